#![no_main]

//! Input is NUL-separated argv; the first chunk after `--config` is served as the file body.

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let mut parts = text.split('\0');
    let file = parts.next().unwrap_or("").to_string();
    let args: Vec<&str> = std::iter::once("cqed").chain(parts).collect();
    let Ok(cli) = cqed::cli::parse_args(&args) else {
        return;
    };
    let _ = cqed::cli::resolve_with_loader(&cli, |_| Ok(file.clone()));
});

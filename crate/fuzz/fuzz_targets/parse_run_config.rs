#![no_main]

use fts_cli::config::parse_config_text;
use libfuzzer_sys::fuzz_target;

const COMMANDS: [&str; 4] = ["simulate", "smooth", "cv", "analyze"];

fuzz_target!(|data: &[u8]| {
    let Some((&selector, rest)) = data.split_first() else {
        return;
    };
    let Ok(text) = std::str::from_utf8(rest) else {
        return;
    };
    let _ = parse_config_text(COMMANDS[selector as usize % COMMANDS.len()], text);
});

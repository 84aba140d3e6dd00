use std::io;

use log::LevelFilter;

fn log_level() -> LevelFilter {
    match std::env::var("P2G_LOG").as_deref() {
        Ok("off") => LevelFilter::Off,
        Ok("info") => LevelFilter::Info,
        Ok("debug") => LevelFilter::Debug,
        _ => LevelFilter::Warn,
    }
}

fn main() {
    env_logger::Builder::new()
        .filter_level(log_level())
        .target(env_logger::Target::Stderr)
        .format_timestamp(None)
        .init();
    let code = p2g::cli::run(
        std::env::args_os(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    std::process::exit(code);
}

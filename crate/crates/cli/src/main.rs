fn main() {
    actisim_cli::init_logging();
    std::process::exit(actisim_cli::run_from(std::env::args_os()));
}

fn main() {
    std::process::exit(walshlab_cli::run(std::env::args_os()));
}

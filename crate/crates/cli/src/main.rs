fn main() -> std::process::ExitCode {
    descent_cli::main_with(std::env::args_os())
}

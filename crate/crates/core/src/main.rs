fn main() -> std::process::ExitCode {
    barrierscope::cli::main_with_args(std::env::args_os())
}

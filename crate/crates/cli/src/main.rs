use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(poisson_grad_cli::main_with_args(std::env::args_os()))
}

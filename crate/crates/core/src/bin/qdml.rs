use std::process::ExitCode;

fn main() -> ExitCode {
    hypercube_dml::cli::main()
}

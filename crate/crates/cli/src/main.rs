fn main() {
    std::process::exit(fracstab_cli::run_from_args(std::env::args_os()));
}

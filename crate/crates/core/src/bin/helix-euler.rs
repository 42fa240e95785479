fn main() {
    std::process::exit(helix_euler::cli::run_command(std::env::args_os()));
}

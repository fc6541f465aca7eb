fn main() {
    std::process::exit(grid_fisher::cli::execute(std::env::args_os()));
}

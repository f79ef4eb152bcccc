fn main() {
    std::process::exit(hypgraph::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(ecgraph_cli::main_with_args(std::env::args_os()));
}

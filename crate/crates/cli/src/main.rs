fn main() {
    std::process::exit(partial_search_cli::main_with_env());
}

fn main() { std::process::exit(thinspec::cli::main()); }

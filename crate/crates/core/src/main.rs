fn main() {
    std::process::exit(dephasim::cli::main_entry());
}

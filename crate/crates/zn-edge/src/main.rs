fn main() {
    std::process::exit(zn_edge::cli::main_entry());
}

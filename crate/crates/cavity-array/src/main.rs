fn main() {
    std::process::exit(cavity_array::cli::main_entry());
}

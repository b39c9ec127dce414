fn main() {
    std::process::exit(mpiso::cli::main_entry());
}

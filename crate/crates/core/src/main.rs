fn main() {
    std::process::exit(acfront::cli::main_entry());
}

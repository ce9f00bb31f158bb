fn main() {
    std::process::exit(vein_core::cli::main_from(std::env::args_os()));
}

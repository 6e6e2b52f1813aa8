fn main() {
    std::process::exit(prologtheta::cli::main_from_env());
}

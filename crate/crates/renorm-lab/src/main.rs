fn main() {
    std::process::exit(renorm_lab::run(std::env::args_os()));
}

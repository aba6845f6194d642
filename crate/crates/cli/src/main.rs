fn main() {
    let (text, code) = handlebody_cli::run(std::env::args_os());
    print!("{text}");
    std::process::exit(code);
}

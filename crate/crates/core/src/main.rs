use std::io::Write;

fn main() {
    let (out, code) = katofan::cli::execute(std::env::args_os().skip(1));
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(out.as_bytes());
    let _ = stdout.flush();
    std::process::exit(code);
}

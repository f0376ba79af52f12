use std::io::Write;

fn main() {
    let (out, code) = qdesk_cli::main_with_args(std::env::args_os());
    let mut stdout = std::io::stdout().lock();
    // a closed pipe is not worth a panic
    let _ = stdout.write_all(out.as_bytes());
    let _ = stdout.flush();
    std::process::exit(code);
}

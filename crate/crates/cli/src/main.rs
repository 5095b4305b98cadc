use std::io::{stderr, stdout};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let env_seed = std::env::var("CARTAN_VMRT_SEED").ok();
    let code = cartan_vmrt::app::run(&args, env_seed.as_deref(), &mut stdout(), &mut stderr());
    std::process::exit(code);
}

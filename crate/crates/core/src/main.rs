fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    std::panic::set_hook(Box::new(|info| log::error!("{info}")));
    std::process::exit(stabcast::cli::dispatch(std::env::args_os()));
}

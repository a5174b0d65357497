use fraclab::harness::ExperimentConfig;

fn main() {
    let dir = std::path::Path::new("configs");
    std::fs::create_dir_all(dir).unwrap();
    for name in ["thm1", "thm2", "cor3", "adams", "kernel-suite", "examples"] {
        let cfg = ExperimentConfig::frozen(name).unwrap();
        let mut text = serde_json::to_string_pretty(&cfg).unwrap();
        text.push('\n');
        std::fs::write(dir.join(format!("{name}.json")), text).unwrap();
    }
    // corpus spec: every family, two draws each, the standard 1-D grid
    let cs = fraclab::corpus::CorpusSpec::new(
        42,
        fraclab::corpus::ALL_FAMILIES.to_vec(),
        2,
        fraclab::grid::GridSpec::new(1, 256, 16.0, 2).unwrap(),
    );
    let mut text = serde_json::to_string_pretty(&cs).unwrap();
    text.push('\n');
    std::fs::write(dir.join("corpus.json"), text).unwrap();
    println!("configs written");
}

//! Loads a passing matrix from JSON or CSV and reports each strategy's pick.
//!
//! ```text
//! cargo run --example select_from_file -- examples/data/running_example.csv
//! ```

use std::path::PathBuf;

use plausel::{load_matrix, pass_at_1, B4Hyperparams, StrategyKind, StrategySpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let path = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data/running_example.json")
        });
    let file = match load_matrix(&path, None) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    };
    let (n, m) = file.matrix.dims();
    println!("{}: {n} solutions x {m} tests ({})", path.display(), file.format);

    let hyper = B4Hyperparams::b4(10.0, 10.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for kind in [
        StrategyKind::B4,
        StrategyKind::CodeT,
        StrategyKind::MbrExec,
        StrategyKind::MaxPass,
        StrategyKind::Random,
    ] {
        let result = StrategySpec::from_kind(kind, hyper).select(&file.matrix, &mut rng);
        let labels: Vec<String> = result
            .chosen
            .iter()
            .map(|&i| file.matrix.solution_label(i))
            .collect();
        let score = file
            .truth_x
            .as_ref()
            .map(|t| format!("  Pass@1 {:.3}", pass_at_1(&result.chosen, t).unwrap()))
            .unwrap_or_default();
        println!("{:>8}: {labels:?}{score}", kind.name());
    }
}

use omsig::game::{self, GameFault, Scheme, Strategy};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde_json::json;

use crate::args::{HarnessCommand, HarnessRunArgs, SchemeArg};
use crate::error::{CliError, CliResult};
use crate::{store, Output};

pub(crate) fn run(cmd: HarnessCommand, out: &Output) -> CliResult<()> {
    match cmd {
        HarnessCommand::Run(a) => run_game(a, out),
    }
}

fn run_game(a: HarnessRunArgs, out: &Output) -> CliResult<()> {
    let strategy = Strategy::from_name(&a.strategy).ok_or_else(|| {
        let known: Vec<_> = Strategy::ALL.iter().map(|s| s.name()).collect();
        CliError::usage("strategy", format!("unknown strategy {:?}; one of {}", a.strategy, known.join(", ")))
    })?;
    if a.ell == 0 {
        return Err(CliError::usage("ell", "--ell must be positive"));
    }
    let scheme = match a.scheme {
        SchemeArg::Ds => Scheme::Ds { ell: a.ell },
        SchemeArg::Sas => Scheme::Sas { ell: a.ell },
        SchemeArg::Oms => Scheme::Oms,
    };
    let mut rng = ChaCha20Rng::seed_from_u64(a.seed);
    let t = game::run_euf_cma_game(scheme, strategy, &mut rng).map_err(|e| match e {
        GameFault::Unsupported(..) => CliError::usage("unsupported", e.to_string()),
        _ => CliError::reject("game", e.to_string()),
    })?;
    let verdict = game::judge(&t).map_err(|e| CliError::reject("game", e.to_string()))?;
    if let Some(p) = &a.out {
        store::write(p, t.to_json().as_bytes())?;
    }
    let mut human = vec![format!(
        "{scheme} / {}: adversary {} (verifies={}, fresh={}, certified={})",
        strategy.name(),
        if t.verdict { "WINS" } else { "loses" },
        verdict.verifies,
        verdict.fresh,
        verdict.certified
    )];
    for r in t.audit() {
        human.push(format!("  {:<10} args {}  response {}", r.query, &r.args_hash[..16], &r.response_hash[..16]));
    }
    out.emit(
        json!({
            "scheme": scheme.to_string(),
            "strategy": strategy.name(),
            "adversary_wins": t.verdict,
            "verdict": verdict,
            "audit": t.audit(),
        }),
        human.join("\n"),
    );
    Ok(())
}

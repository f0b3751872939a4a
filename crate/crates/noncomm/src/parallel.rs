//! Thread fan-out for class enumeration. Results never depend on the thread
//! count: jobs are deterministic and merged in job order.

use noncomm_core::backtrack::SearchBudget;
use noncomm_core::classes::{
    self, choose_quotient_action, ClassError, ClassInventory, ClassOptions, ClassProgress, ClassStrategy, LiftingPlan,
    QuotientAction, DIRECT_LIMIT,
};
use noncomm_core::{Perm, StabilizerChain};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Runs `f` on a pool of `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build().expect("thread pool").install(f),
        None => f(),
    }
}

pub fn enumerate_lifted(chain: &StabilizerChain, action: QuotientAction) -> Result<ClassInventory, ClassError> {
    let plan = LiftingPlan::new(chain, action)?;
    let jobs = (0..plan.job_count()).into_par_iter().map(|j| plan.run_job(j)).collect::<Result<Vec<_>, _>>()?;
    Ok(plan.finish(jobs))
}

/// As [`classes::enumerate_classes`], with lifting jobs run in parallel.
pub fn enumerate_classes(
    chain: &StabilizerChain,
    central: &[Perm],
    seed: u64,
    options: &ClassOptions,
    budget: SearchBudget<'_>,
    progress: &mut dyn ClassProgress,
) -> Result<ClassInventory, ClassError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lifted = match &options.strategy {
        ClassStrategy::Lifted(action) => Some(action.clone()),
        ClassStrategy::Auto if !chain.order_u64().is_some_and(|n| n <= DIRECT_LIMIT) => choose_quotient_action(chain),
        _ => None,
    };
    match lifted {
        Some(action) => enumerate_lifted(chain, action),
        None => classes::enumerate_classes(chain, central, &mut rng, options, budget, progress),
    }
}

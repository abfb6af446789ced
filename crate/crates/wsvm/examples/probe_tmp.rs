use wsvm::commands::{init_workers, subseed};
use wsvm::data::{gen_example, stratified_split, SplitSpec};
use wsvm::ladder::{train_ladder, WeightGrid};
use wsvm::metrics::{l1_error, test_error};
use wsvm::schemes::{classify_max_prob, select_baseline_b1};
use wsvm::train::{fit_scheme, scheme_tasks, FitOptions};
use wsvm::tuning::{TuneCriterion, TuneGrid};
use wsvm::SchemeKind;

fn main() {
    init_workers(2);
    let seed = 20260810u64;
    for run in 0..3u64 {
        let (pool, oracle) = gen_example(1, 1000, subseed(seed, run, 0)).unwrap();
        let split = SplitSpec::new(0.5, 0.5, 0.0, false, subseed(seed, run, 1)).unwrap();
        let (train, tune, _) = stratified_split(&pool, &split).unwrap();
        let (test, _) = gen_example(1, 10_000, subseed(seed, run, 2)).unwrap();
        let p_true: Vec<Vec<f64>> = test.features().rows().map(|x| oracle.probs(x)).collect();

        // shared-(lambda, sigma) selection for B1: sum each task's EGKL score map
        let fitted = fit_scheme(&train, &tune, SchemeKind::Baseline1, None, &FitOptions::default()).unwrap();
        let grid = TuneGrid::default_for(&train, TuneCriterion::Egkl).unwrap();
        let ncand = grid.lambdas.len() * grid.sigmas.len();
        let mut sums = vec![0.0f64; ncand];
        let mut ok = vec![true; ncand];
        for rep in &fitted.reports {
            for (ci, s) in rep.scores.iter().enumerate() {
                match s.score { Some(v) => sums[ci] += v, None => ok[ci] = false }
            }
        }
        let mut best: Option<(usize, f64)> = None;
        for ci in 0..ncand {
            if ok[ci] {
                if best.is_none() || sums[ci] < best.unwrap().1 { best = Some((ci, sums[ci])); }
            }
        }
        let (ci, _) = best.unwrap();
        let (l_sh, s_sh) = (fitted.reports[0].scores[ci].lambda, fitted.reports[0].scores[ci].sigma);

        // retrain all tasks at the shared pair
        let wg = WeightGrid::default_for(train.n()).unwrap();
        let spec = wsvm::kernel::KernelSpec::rbf(s_sh).unwrap();
        let baseline = select_baseline_b1(&train).unwrap();
        let tasks = scheme_tasks(&train, SchemeKind::Baseline1, Some(&baseline)).unwrap();
        let ladders: Vec<_> = tasks.iter()
            .map(|t| train_ladder(&train, t, &wg, l_sh, &spec, &Default::default()).unwrap())
            .collect();
        let model = wsvm::SchemeModel {
            kind: SchemeKind::Baseline1,
            num_classes: train.num_classes(),
            dim: train.dim(),
            baseline: Some(baseline),
            ladders,
            normalize_ova: false,
            vote_rule: wsvm::VoteRule::GtHalf,
        };
        let est = model.probs_batch(test.features()).unwrap();
        let p_hat: Vec<Vec<f64>> = est.iter().map(|e| e.probs.clone()).collect();
        let labels: Vec<usize> = est.iter().map(classify_max_prob).collect();
        println!(
            "run {run}: shared (lambda={l_sh:.1e}, sigma={s_sh:.2}) -> L1={:.1} TE1={:.1}   [per-task was L1={:.1} TE1={:.1}]",
            100.0 * l1_error(&p_true, &p_hat).unwrap(),
            100.0 * test_error(test.labels(), &labels).unwrap(),
            {
                let pe = fitted.model.probs_batch(test.features()).unwrap();
                let ph: Vec<Vec<f64>> = pe.iter().map(|e| e.probs.clone()).collect();
                100.0 * l1_error(&p_true, &ph).unwrap()
            },
            {
                let pe = fitted.model.probs_batch(test.features()).unwrap();
                let lb: Vec<usize> = pe.iter().map(|e| classify_max_prob(e)).collect();
                100.0 * test_error(test.labels(), &lb).unwrap()
            },
        );
    }
}

//! The seven command drivers. Each returns a `Report` whose `exit_code`
//! follows the contract: 0 well-typed / success, 2 rejected with a
//! diagnosis, 1 usage or internal error (surfaced as `Err`).

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde_json::json;

use ila_core::ir::{self, CoreCmd, CoreExpr, InputDecl, InputKind, OpKind, Pos};
use ila_core::model::{
    check_commutativity, check_downwards_closed, Bound, BoundArg, SchemeKind, SchemeModel,
};
use ila_core::msinfer;
use ila_core::rational::rat;
use ila_core::refscheme::{self, center_mod, Poly, ToyParams};
use ila_core::schemes::shrink_bound_arg;
use ila_core::semantics::{
    self, check_message_equivalence, eval_msg, eval_native, initial_context, initial_substitution,
    EvalTrace,
};
use ila_core::typecheck::{type_cmd, TypingContext};

use crate::config::SchemeConfig;
use crate::report::{final_type_row, OutputJson, ProbeRow, Report};

pub struct LoadedCircuit {
    pub lowered: ir::LoweredProgram,
    pub gamma0: TypingContext,
}

pub fn load_circuit(model: &SchemeModel, path: &Path) -> Result<LoadedCircuit> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read circuit {}", path.display()))?;
    let surface = ir::parse(&text).map_err(|e| anyhow!("{e}"))?;
    let lowered = ir::lower(&surface).map_err(|e| anyhow!("{e}"))?;
    let gamma0 = initial_context(model, &lowered.inputs).map_err(|e| anyhow!("{e}"))?;
    Ok(LoadedCircuit { lowered, gamma0 })
}

fn msg_display(v: &[BigInt]) -> String {
    if v.len() == 1 {
        v[0].to_string()
    } else {
        let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        format!("[{}]", parts.join(", "))
    }
}

/// `ila check`: static typecheck only. Never touches key material; the
/// model is built without secret parameters regardless of any seed in the
/// config.
pub fn cmd_check(cfg: &SchemeConfig, circuit: &Path) -> Result<Report> {
    let model = cfg.build_static_model()?;
    let mut report = Report::new("check", &cfg.scheme);
    let t0 = Instant::now();
    let loaded = load_circuit(&model, circuit)?;
    match type_cmd(&model, &loaded.gamma0, &loaded.lowered.body) {
        Ok(gamma) => {
            report.verdict = "well-typed".into();
            for (var, ty) in gamma.iter() {
                report.final_types.push(final_type_row(&model, var, ty));
            }
        }
        Err(diag) => {
            report = report.rejected(&diag);
        }
    }
    report
        .timings_ms
        .insert("check".into(), t0.elapsed().as_secs_f64() * 1e3);
    Ok(report)
}

fn oracle_model(cfg: &SchemeConfig, seed: Option<u64>) -> Result<(SchemeModel, u64)> {
    let seed = seed
        .or(cfg.seed)
        .ok_or_else(|| anyhow!("this mode needs key material: pass --seed or set it in the config"))?;
    Ok((cfg.build_model(Some(seed))?, seed))
}

/// `ila run`: typecheck, encrypt the declared inputs, evaluate natively,
/// decrypt every variable.
pub fn cmd_run(
    cfg: &SchemeConfig,
    circuit: &Path,
    seed: Option<u64>,
    trace: bool,
) -> Result<Report> {
    let (model, seed) = oracle_model(cfg, seed)?;
    let mut report = Report::new("run", &cfg.scheme);
    report
        .notes
        .push("toy scheme is INSECURE: oracle mode is for validation only".into());
    let loaded = load_circuit(&model, circuit)?;
    if let Err(diag) = type_cmd(&model, &loaded.gamma0, &loaded.lowered.body) {
        return Ok(report.rejected(&diag));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x11ac0de);
    let env = initial_substitution(&model, &loaded.lowered.inputs, &mut rng)
        .map_err(|e| anyhow!("{e}"))?;
    let t0 = Instant::now();
    let mut tr = EvalTrace::default();
    let out = eval_native(
        &model,
        &env,
        &loaded.lowered.body,
        trace.then_some(&mut tr),
    )
    .map_err(|e| anyhow!("{e}"))?;
    report
        .timings_ms
        .insert("eval".into(), t0.elapsed().as_secs_f64() * 1e3);
    for (var, value) in &out {
        let decoded = model.interp(value).map_err(|e| anyhow!("{e}"))?;
        report.outputs.push(OutputJson {
            var: var.clone(),
            value: msg_display(&decoded),
        });
    }
    if trace {
        for e in &tr.entries {
            report.probe.push(ProbeRow {
                label: "trace".into(),
                q_bits: None,
                p: None,
                data: [
                    ("var".to_string(), json!(e.var)),
                    ("pos".to_string(), json!(e.pos.to_string())),
                    ("measured".to_string(), json!(e.measured.to_string())),
                ]
                .into_iter()
                .collect(),
            });
        }
    }
    Ok(report)
}

/// `ila run-msg`: the cleartext run. Inputs are the declared literals
/// interpreted as messages; no key material is involved.
pub fn cmd_run_msg(cfg: &SchemeConfig, circuit: &Path) -> Result<Report> {
    let model = cfg.build_static_model()?;
    let mut report = Report::new("run-msg", &cfg.scheme);
    let loaded = load_circuit(&model, circuit)?;
    let mut env = std::collections::BTreeMap::new();
    for inp in &loaded.lowered.inputs {
        env.insert(inp.name.clone(), vec![center_mod(&inp.value, &model.t)]);
    }
    let out = eval_msg(&model, &env, &loaded.lowered.body).map_err(|e| anyhow!("{e}"))?;
    for (var, value) in &out {
        report.outputs.push(OutputJson {
            var: var.clone(),
            value: msg_display(value),
        });
    }
    Ok(report)
}

/// `ila infer-ms`: run modswitch inference, write the rewritten circuit,
/// report the rewrite log and final levels.
pub fn cmd_infer_ms(
    cfg: &SchemeConfig,
    circuit: &Path,
    out_path: Option<&Path>,
) -> Result<Report> {
    let model = cfg.build_static_model()?;
    let mut report = Report::new("infer-ms", &cfg.scheme);
    let loaded = load_circuit(&model, circuit)?;

    let result = if loaded.lowered.body.contains_if() {
        msinfer::infer_in_cmd(&model, &loaded.gamma0, &loaded.lowered.body)
            .map(|(cmd, inserted, log)| (cmd, inserted, log))
    } else {
        let ssa = ir::to_ssa(&loaded.lowered.body).map_err(msinfer::InferFailure::Ssa)?;
        msinfer::infer_modswitch(&ssa, &loaded.gamma0, &model).map(|outcome| {
            (
                ir::ssa_to_cmd(&outcome.program),
                outcome.inserted,
                outcome.log,
            )
        })
    };

    match result {
        Ok((body, inserted, log)) => {
            let rewritten = ir::LoweredProgram {
                inputs: loaded.lowered.inputs.clone(),
                body,
            };
            let text = ir::pretty_lowered(&rewritten);
            match out_path {
                Some(p) => {
                    std::fs::write(p, &text)
                        .with_context(|| format!("cannot write {}", p.display()))?;
                    report.notes.push(format!("rewritten circuit written to {}", p.display()));
                }
                None => report.notes.push(format!("rewritten circuit:\n{text}")),
            }
            report.notes.push(format!("inserted {inserted} modswitch operation(s)"));
            for line in log {
                report.notes.push(line);
            }
            let gamma = type_cmd(&model, &loaded.gamma0, &rewritten.body)
                .map_err(|d| anyhow!("rewritten program no longer typechecks: {d}"))?;
            for (var, ty) in gamma.iter() {
                report.final_types.push(final_type_row(&model, var, ty));
            }
            report.verdict = "well-typed".into();
        }
        Err(msinfer::InferFailure::NotNoise(diag)) => {
            report = report.rejected(&diag);
            report
                .notes
                .push("rejection is not a noise overflow; switching cannot help".into());
        }
        Err(e) => {
            report.verdict = "fail".into();
            report.exit_code = 2;
            report.notes.push(format!("{e}"));
        }
    }
    Ok(report)
}

/// Modulus of about `bits` bits, congruent to 1 mod t.
pub fn probe_modulus(bits: u32, t: &BigInt) -> BigInt {
    use num_integer::Integer;
    let base: BigInt = BigInt::from(1) << bits as usize;
    if t <= &BigInt::from(1) {
        return base + 1;
    }
    let shift = (BigInt::from(1) - &base).mod_floor(t);
    let q = &base + shift;
    if q == base {
        q + t
    } else {
        q
    }
}

/// One static multiply-depth measurement: how many chained multiplies of
/// fresh bounds does the checker accept.
fn static_depth(
    model: &SchemeModel,
    fresh: &Bound,
    other: &Bound,
    op: OpKind,
    max_depth: u32,
) -> u32 {
    let spec = match model.op(op) {
        Ok(s) => s,
        Err(_) => return 0,
    };
    let mut acc = fresh.clone();
    for k in 0..max_depth {
        let args = [
            BoundArg::plain(acc.clone()),
            BoundArg::plain(other.clone()),
        ];
        match (spec.bounds)(&args) {
            Ok(b) => acc = b,
            Err(_) => return k,
        }
    }
    max_depth
}

fn fresh_cipher_bound(model: &SchemeModel) -> Bound {
    match model.kind {
        SchemeKind::Bgv => Bound::BgvCipher {
            inf: rat(1),
            sup: rat(1),
            noise: model.fresh_noise.clone(),
            level: model.top_level(),
        },
        SchemeKind::Bfv => Bound::BfvCipher {
            inf: rat(1),
            sup: rat(1),
            noise: model.fresh_noise.clone(),
        },
        SchemeKind::Tfhe => Bound::TfheCipher {
            id: ila_core::model::TfheId::Lwe,
            inf: rat(1),
            sup: rat(1),
            noise: model.fresh_noise.clone(),
        },
    }
}

/// Dynamic multiply depth: chain fresh encryptions of 1 until decryption
/// stops returning 1. Returns the deepest correct level.
fn dynamic_depth_bgv(
    params: &ToyParams,
    seed: u64,
    max_depth: u32,
    plain_variant: bool,
) -> u32 {
    let keys = refscheme::bgv::keygen(params, seed);
    let mut rng = ChaCha20Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9));
    let one = Poly::from_scalar(&BigInt::from(1), params.d);
    let top = params.top_level();
    let mut acc = refscheme::bgv::encrypt(&keys, &one, top, &mut rng);
    for k in 0..max_depth {
        let next = if plain_variant {
            refscheme::bgv::hom_mul_plain(&acc, &one, params)
        } else {
            let fresh = refscheme::bgv::encrypt(&keys, &one, top, &mut rng);
            match refscheme::bgv::hom_mul(&keys, &acc, &fresh) {
                Ok(ct) => ct,
                Err(_) => return k,
            }
        };
        if refscheme::bgv::decrypt(&keys, &next) != one.reduce(&params.t) {
            return k;
        }
        acc = next;
    }
    max_depth
}

fn dynamic_depth_bfv(params: &ToyParams, seed: u64, max_depth: u32, plain_variant: bool) -> u32 {
    let keys = refscheme::bfv::keygen(params, seed);
    let mut rng = ChaCha20Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9));
    let one = Poly::from_scalar(&BigInt::from(1), params.d);
    let mut acc = refscheme::bfv::encrypt(&keys, &one, &mut rng);
    for k in 0..max_depth {
        let next = if plain_variant {
            refscheme::bfv::hom_mul_plain(&acc, &one, &keys)
        } else {
            let fresh = refscheme::bfv::encrypt(&keys, &one, &mut rng);
            match refscheme::bfv::hom_mul(&keys, &acc, &fresh) {
                Ok(ct) => ct,
                Err(_) => return k,
            }
        };
        if refscheme::bfv::decrypt(&keys, &next) != one.reduce(&params.t) {
            return k;
        }
        acc = next;
    }
    max_depth
}

pub struct DepthPoint {
    pub q_bits: u32,
    pub d_static_cc: u32,
    pub d_max_cc: u32,
    pub d_static_pc: u32,
    pub d_max_pc: u32,
}

/// Paired static/dynamic depth sweep over coefficient modulus sizes. The
/// dynamic depth is the minimum over `trials` keyed runs, so the
/// soundness inequality D_static <= D_max is checked against the weakest
/// observed run.
pub fn depth_probe_points(
    cfg: &SchemeConfig,
    q_bits: &[u32],
    trials: u32,
    max_depth: u32,
    seed: u64,
) -> Result<Vec<DepthPoint>> {
    let kind = cfg.kind()?;
    if kind == SchemeKind::Tfhe {
        bail!("depth-probe applies to BGV and BFV; use tfhe-overflow-probe for TFHE");
    }
    let t = cfg.t.to_bigint()?;
    let mut points = Vec::new();
    for &bits in q_bits {
        let q = probe_modulus(bits, &t);
        let params = ToyParams {
            t: t.clone(),
            d: cfg.d,
            chain: vec![q.clone()],
            err_width: cfg.err_width,
        };
        params.validate().map_err(|e| anyhow!(e))?;
        // rebuild the model at this modulus with the configured estimator
        let sub_cfg = cfg.with_single_modulus(&q);
        let model = sub_cfg.build_static_model()?;
        let fresh = fresh_cipher_bound(&model);
        let plain_one = Bound::Plain {
            inf: rat(1),
            sup: rat(1),
        };
        let d_static_cc = static_depth(&model, &fresh, &fresh, OpKind::Mul, max_depth);
        let d_static_pc = static_depth(&model, &fresh, &plain_one, OpKind::Mul, max_depth);
        let mut d_max_cc = max_depth;
        let mut d_max_pc = max_depth;
        for trial in 0..trials {
            let s = seed
                .wrapping_add(u64::from(bits) << 32)
                .wrapping_add(u64::from(trial));
            let (cc, pc) = match kind {
                SchemeKind::Bgv => (
                    dynamic_depth_bgv(&params, s, max_depth, false),
                    dynamic_depth_bgv(&params, s ^ 0xffff, max_depth, true),
                ),
                SchemeKind::Bfv => (
                    dynamic_depth_bfv(&params, s, max_depth, false),
                    dynamic_depth_bfv(&params, s ^ 0xffff, max_depth, true),
                ),
                SchemeKind::Tfhe => unreachable!(),
            };
            d_max_cc = d_max_cc.min(cc);
            d_max_pc = d_max_pc.min(pc);
        }
        points.push(DepthPoint {
            q_bits: bits,
            d_static_cc,
            d_max_cc,
            d_static_pc,
            d_max_pc,
        });
    }
    Ok(points)
}

pub fn cmd_depth_probe(
    cfg: &SchemeConfig,
    q_bits: &[u32],
    trials: u32,
    max_depth: u32,
    seed: Option<u64>,
) -> Result<Report> {
    let seed = seed.or(cfg.seed).unwrap_or(1);
    let mut report = Report::new("depth-probe", &cfg.scheme);
    let t0 = Instant::now();
    let points = depth_probe_points(cfg, q_bits, trials, max_depth, seed)?;
    let mut sound = true;
    for p in &points {
        sound &= p.d_static_cc <= p.d_max_cc;
        report.probe.push(ProbeRow {
            label: "depth".into(),
            q_bits: Some(p.q_bits),
            p: None,
            data: [
                ("d_static_cc".to_string(), json!(p.d_static_cc)),
                ("d_max_cc".to_string(), json!(p.d_max_cc)),
                ("d_static_pc".to_string(), json!(p.d_static_pc)),
                ("d_max_pc".to_string(), json!(p.d_max_pc)),
            ]
            .into_iter()
            .collect(),
        });
    }
    report
        .timings_ms
        .insert("sweep".into(), t0.elapsed().as_secs_f64() * 1e3);
    if !sound {
        report.verdict = "fail".into();
        report.exit_code = 2;
        report
            .notes
            .push("static depth exceeded the dynamic maximum somewhere".into());
    }
    Ok(report)
}

/// Build the TFHE value-overflow probe circuit: start a cipher at -t/2 and
/// add the plaintext constant 1, `2^p` times.
pub fn tfhe_overflow_circuit(p: u32, t: &BigInt) -> (Vec<InputDecl>, CoreCmd) {
    let additions: u64 = 1u64 << p;
    let base = center_mod(&(-(t.clone()) / 2), t);
    let inputs = vec![InputDecl {
        name: "acc0".into(),
        kind: InputKind::Cipher,
        value: base,
        pos: Pos::new(1, 1),
    }];
    let mut cmds = Vec::with_capacity(additions as usize);
    let mut prev = "acc0".to_string();
    for i in 1..=additions {
        let var = format!("acc{i}");
        cmds.push(CoreCmd::Assign(
            var.clone(),
            CoreExpr::Op(
                OpKind::Add,
                vec![
                    CoreExpr::Var(prev.clone()),
                    CoreExpr::Const(ir::ConstValue::Plain(BigInt::from(1))),
                ],
            ),
            // position line records the addition index for the report
            Pos::new(i as u32, 1),
        ));
        prev = var;
    }
    (inputs, CoreCmd::seq(cmds))
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs[xs.len() / 2]
}

pub struct TfheProbePoint {
    pub p: u32,
    pub additions: u64,
    pub reject_at: Option<u64>,
    pub static_ms: f64,
    pub sim_reject_at: Option<u64>,
    pub sim_ms: f64,
}

pub fn tfhe_probe_points(
    cfg: &SchemeConfig,
    p_values: &[u32],
    timing_runs: u32,
) -> Result<Vec<TfheProbePoint>> {
    if cfg.kind()? != SchemeKind::Tfhe {
        bail!("tfhe-overflow-probe needs a TFHE scheme config");
    }
    let q = cfg.modulus_chain[0].to_bigint()?;
    let mut out = Vec::new();
    for &p in p_values {
        let t = BigInt::from(1u64) << p as usize;
        // probe at this t with the configured q
        let sub = cfg.with_t_and_modulus(&t, &q);
        let model = sub.build_static_model()?;
        let (inputs, body) = tfhe_overflow_circuit(p, &t);
        let gamma0 = initial_context(&model, &inputs).map_err(|e| anyhow!("{e}"))?;

        let mut reject_at = None;
        let mut times = Vec::new();
        for _ in 0..timing_runs.max(1) {
            let t0 = Instant::now();
            let r = type_cmd(&model, &gamma0, &body);
            times.push(t0.elapsed().as_secs_f64() * 1e3);
            reject_at = match r {
                Ok(_) => None,
                Err(diag) => diag.pos.map(|pos| u64::from(pos.line)),
            };
        }

        // simulated-dynamic baseline: run the additions until the wrap flag
        let oracle = sub.with_seed(1).build_model(Some(1))?;
        let mut sim_reject_at = None;
        let mut sim_times = Vec::new();
        for _ in 0..timing_runs.max(1) {
            let mut rng = ChaCha20Rng::seed_from_u64(7);
            let env = initial_substitution(&oracle, &inputs, &mut rng)
                .map_err(|e| anyhow!("{e}"))?;
            let t0 = Instant::now();
            let mut acc = env["acc0"].clone();
            let mut hit = None;
            for i in 1..=(1u64 << p) {
                let one = ila_core::model::Value::Plain((oracle.encode)(&BigInt::from(1)));
                let spec = oracle.op(OpKind::Add).unwrap();
                acc = (spec.native)(&[acc, one]).map_err(|e| anyhow!("{e}"))?;
                if let ila_core::model::Value::TfheCipher(s) = &acc {
                    if s.wrapped(&tfhe_params_of(&oracle)) {
                        hit = Some(i);
                        break;
                    }
                }
            }
            sim_times.push(t0.elapsed().as_secs_f64() * 1e3);
            sim_reject_at = hit;
        }

        out.push(TfheProbePoint {
            p,
            additions: 1u64 << p,
            reject_at,
            static_ms: median(times),
            sim_reject_at,
            sim_ms: median(sim_times),
        });
    }
    Ok(out)
}

fn tfhe_params_of(model: &SchemeModel) -> refscheme::TfheParams {
    refscheme::TfheParams {
        t: model.t.clone(),
        q: model.chain[0].clone(),
        fresh_noise: model.fresh_noise.clone(),
        pbs_noise: model.fresh_noise.clone(),
    }
}

pub fn cmd_tfhe_overflow_probe(
    cfg: &SchemeConfig,
    p_values: &[u32],
    timing_runs: u32,
) -> Result<Report> {
    let mut report = Report::new("tfhe-overflow-probe", &cfg.scheme);
    let points = tfhe_probe_points(cfg, p_values, timing_runs)?;
    let mut exact = true;
    for pt in &points {
        exact &= pt.reject_at == Some(pt.additions);
        report.probe.push(ProbeRow {
            label: "tfhe-overflow".into(),
            q_bits: None,
            p: Some(pt.p),
            data: [
                ("additions".to_string(), json!(pt.additions)),
                ("reject_at".to_string(), json!(pt.reject_at)),
                ("static_ms".to_string(), json!(pt.static_ms)),
                ("sim_reject_at".to_string(), json!(pt.sim_reject_at)),
                ("sim_ms".to_string(), json!(pt.sim_ms)),
            ]
            .into_iter()
            .collect(),
        });
    }
    if !exact {
        report.verdict = "fail".into();
        report.exit_code = 2;
        report
            .notes
            .push("static rejection did not land exactly on the 2^p-th addition".into());
    }
    Ok(report)
}

pub struct AxiomSummary {
    pub op: String,
    pub comm_pass: u32,
    pub comm_vacuous: u32,
    pub comm_fail: u32,
    pub down_pass: u32,
    pub down_vacuous: u32,
    pub down_fail: u32,
}

/// Randomized validity-axiom harness over every operator of the model.
pub fn axiom_check_model(
    model: &SchemeModel,
    comm_trials: u32,
    down_trials: u32,
    seed: u64,
) -> Result<Vec<AxiomSummary>> {
    if model.oracle.is_none() {
        bail!("axiom-check needs secret parameters: pass --seed or set it in the config");
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (op, spec) in &model.ops {
        if spec.sample_args.is_none() && spec.sample_bounds.is_none() {
            continue;
        }
        let mut s = AxiomSummary {
            op: op.to_string(),
            comm_pass: 0,
            comm_vacuous: 0,
            comm_fail: 0,
            down_pass: 0,
            down_vacuous: 0,
            down_fail: 0,
        };
        if let Some(sampler) = &spec.sample_args {
            for _ in 0..comm_trials {
                let args = sampler(&mut rng);
                if args.is_empty() {
                    continue;
                }
                let verdict = check_commutativity(model, *op, &args)
                    .map_err(|e| anyhow!("commutativity harness: {e}"))?;
                if !verdict.holds {
                    s.comm_fail += 1;
                } else if verdict.vacuous {
                    s.comm_vacuous += 1;
                } else {
                    s.comm_pass += 1;
                }
            }
        }
        if let Some(sampler) = &spec.sample_bounds {
            for _ in 0..down_trials {
                let bounds = sampler(&mut rng);
                if bounds.is_empty() {
                    continue;
                }
                let smaller: Vec<BoundArg> = bounds
                    .iter()
                    .map(|b| shrink_bound_arg(b, &mut rng))
                    .collect();
                let verdict = check_downwards_closed(model, *op, &bounds, &smaller)
                    .map_err(|e| anyhow!("downwards harness: {e}"))?;
                if !verdict.holds {
                    s.down_fail += 1;
                } else if verdict.vacuous {
                    s.down_vacuous += 1;
                } else {
                    s.down_pass += 1;
                }
            }
        }
        out.push(s);
    }
    Ok(out)
}

pub fn cmd_axiom_check(
    cfg: &SchemeConfig,
    seed: Option<u64>,
    trials: u32,
) -> Result<Report> {
    let (model, seed) = oracle_model(cfg, seed)?;
    let mut report = Report::new("axiom-check", &cfg.scheme);
    report
        .notes
        .push("toy scheme is INSECURE: oracle mode is for validation only".into());
    let t0 = Instant::now();
    let summaries = axiom_check_model(&model, trials, trials, seed)?;
    report
        .timings_ms
        .insert("harness".into(), t0.elapsed().as_secs_f64() * 1e3);
    let mut failed = false;
    for s in summaries {
        failed |= s.comm_fail > 0 || s.down_fail > 0;
        report.probe.push(ProbeRow {
            label: "axiom".into(),
            q_bits: None,
            p: None,
            data: [
                ("op".to_string(), json!(s.op)),
                ("commutativity".to_string(), json!(format!(
                    "{} pass / {} vacuous / {} fail",
                    s.comm_pass, s.comm_vacuous, s.comm_fail
                ))),
                ("downwards_closed".to_string(), json!(format!(
                    "{} pass / {} vacuous / {} fail",
                    s.down_pass, s.down_vacuous, s.down_fail
                ))),
            ]
            .into_iter()
            .collect(),
        });
    }
    if failed {
        report.verdict = "fail".into();
        report.exit_code = 2;
    }
    Ok(report)
}

/// `ila run` followed by an equivalence verification (used by tests; also
/// reachable through `run --trace`).
pub fn run_equivalence(
    cfg: &SchemeConfig,
    circuit: &Path,
    seed: u64,
) -> Result<ila_core::semantics::EquivVerdict> {
    let (model, seed) = oracle_model(cfg, Some(seed))?;
    let loaded = load_circuit(&model, circuit)?;
    type_cmd(&model, &loaded.gamma0, &loaded.lowered.body).map_err(|d| anyhow!("{d}"))?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let env = initial_substitution(&model, &loaded.lowered.inputs, &mut rng)
        .map_err(|e| anyhow!("{e}"))?;
    check_message_equivalence(&model, &loaded.gamma0, &env, &loaded.lowered.body)
        .map_err(|e| anyhow!("{e}"))
}

impl SchemeConfig {
    /// Static-mode model: secret parameters are structurally absent (any
    /// seed in the config is ignored).
    pub fn build_static_model(&self) -> Result<SchemeModel> {
        let mut cfg = self.clone();
        cfg.seed = None;
        cfg.build_model(None)
    }

    pub fn with_seed(&self, seed: u64) -> SchemeConfig {
        let mut cfg = self.clone();
        cfg.seed = Some(seed);
        cfg
    }

    pub fn with_single_modulus(&self, q: &BigInt) -> SchemeConfig {
        let mut cfg = self.clone();
        cfg.modulus_chain = vec![crate::config::BigIntField::Text(q.to_string())];
        cfg
    }

    pub fn with_t_and_modulus(&self, t: &BigInt, q: &BigInt) -> SchemeConfig {
        let mut cfg = self.with_single_modulus(q);
        cfg.t = crate::config::BigIntField::Text(t.to_string());
        cfg
    }
}

pub fn write_temp_circuit(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    std::fs::write(&path, text)?;
    Ok(path)
}

pub use semantics::EquivVerdict;

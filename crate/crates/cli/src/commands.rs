use std::io::{Read, Write};
use std::path::Path;

use num_bigint::BigUint;

use slhash::algebra::{Fp64, FpBig, MatrixFp, MatrixText, PrimeField};
use slhash::analysis::{
    girth_lower_bound, linf_distance, measure_girth, play_challenge, walk_distribution, CayleyGraph, Distribution,
    GirthMeasurement, WalkEvolution,
};
use slhash::attacks::{
    emit_em_system, find_symmetrizer, power_entry_witness, rho, symmetrizer_density, FactorizationWord, PowerWitness,
    SymmetrizerMode,
};
use slhash::hasher::{encode_bytes, format_word, hash_bytes, hash_trits, parse_trits, AttributionTable, Digest};
use slhash::params::{build_generators, validate_params, GeneratorSet, ParamSet};
use slhash::tails::{classify_tail, parallel_hash, TailClass, DEFAULT_MIN_SEGMENT};

use crate::config::Settings;
use crate::error::CliError;
use crate::{AnalyzeCommand, AttackCommand, HashArgs, ModeArg, OutputFormat, ParamArgs};

/// `2^61 - 1`.
pub const DEFAULT_P: &str = "2305843009213693951";

fn resolve_params(args: &ParamArgs, settings: &Settings) -> Result<ParamSet, CliError> {
    let n = settings.resolve(args.n, "n", 3usize)?;
    let p_text = settings.resolve(args.p.clone(), "p", DEFAULT_P.to_string())?;
    let p: BigUint = p_text
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("--p: `{p_text}` is not a non-negative integer")))?;
    let a = settings.resolve(args.a, "a", 4)?;
    let b = settings.resolve(args.b, "b", 2)?;
    let ell = settings.resolve(args.ell, "ell", 4)?;
    Ok(validate_params(n, &p, a, b, ell)?)
}

fn word_sized(ps: &ParamSet) -> bool {
    ps.p().bits() < 63
}

fn small_gens(ps: &ParamSet) -> Result<GeneratorSet<Fp64>, CliError> {
    if !word_sized(ps) {
        return Err(CliError::Budget(format!("p = {} is too large for this analysis", ps.p())));
    }
    Ok(build_generators(ps)?)
}

fn load_table(path: Option<&Path>, settings: &Settings) -> Result<AttributionTable, CliError> {
    let path = match path {
        Some(p) => Some(p.to_path_buf()),
        None => settings.raw("table").map(Into::into),
    };
    match path {
        None => Ok(AttributionTable::default_table()),
        Some(p) => {
            let text = std::fs::read_to_string(&p)
                .map_err(|e| CliError::Usage(format!("cannot read table {}: {e}", p.display())))?;
            Ok(AttributionTable::parse_grid(&text)?)
        }
    }
}

fn read_matrix<F: PrimeField>(path: &Path, field: &F) -> Result<MatrixFp<F>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(MatrixText::parse(&text)?.into_fp(field)?)
}

fn write_digest<F: PrimeField>(
    out: &mut dyn Write,
    d: &Digest<F>,
    format: OutputFormat,
    label: Option<&str>,
) -> Result<(), CliError> {
    match (format, label) {
        (OutputFormat::Hex, None) => writeln!(out, "{}", d.to_hex())?,
        (OutputFormat::Hex, Some(l)) => writeln!(out, "{}  {l}", d.to_hex())?,
        (OutputFormat::Matrix, None) => write!(out, "{}", d.matrix())?,
        (OutputFormat::Matrix, Some(l)) => write!(out, "# {l}\n{}", d.matrix())?,
    }
    Ok(())
}

pub fn hash(args: &HashArgs, settings: &Settings, out: &mut dyn Write) -> Result<(), CliError> {
    let ps = resolve_params(&args.params, settings)?;
    if word_sized(&ps) {
        hash_with::<Fp64>(args, &ps, settings, out)
    } else {
        hash_with::<FpBig>(args, &ps, settings, out)
    }
}

fn hash_with<F: PrimeField>(
    args: &HashArgs,
    ps: &ParamSet,
    settings: &Settings,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let gens: GeneratorSet<F> = build_generators(ps)?;
    let table = load_table(args.table.as_deref(), settings)?;
    let workers = args.parallel.unwrap_or(1);
    if workers == 0 {
        return Err(CliError::Usage("--parallel needs at least one worker".into()));
    }
    let min_segment = settings.resolve(args.min_segment, "min_segment", DEFAULT_MIN_SEGMENT)?;
    let digest_trits = |trits: &[u8]| -> Result<Digest<F>, CliError> {
        if workers > 1 {
            Ok(parallel_hash(trits, &table, &gens, workers, min_segment)?)
        } else {
            Ok(hash_trits(trits, &table, &gens)?)
        }
    };
    let digest_bytes = |data: &[u8]| -> Result<Digest<F>, CliError> {
        if workers > 1 {
            digest_trits(&encode_bytes(data))
        } else {
            Ok(hash_bytes(data, &table, &gens))
        }
    };

    if let Some(literal) = &args.trits {
        let trits = parse_trits(literal)?;
        return write_digest(out, &digest_trits(&trits)?, args.format, None);
    }
    if args.files.is_empty() {
        let mut data = Vec::new();
        std::io::stdin().read_to_end(&mut data)?;
        return write_digest(out, &digest_bytes(&data)?, args.format, None);
    }
    for path in &args.files {
        let data = std::fs::read(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        write_digest(out, &digest_bytes(&data)?, args.format, Some(&path.display().to_string()))?;
    }
    Ok(())
}

pub fn validate(args: &ParamArgs, settings: &Settings, out: &mut dyn Write) -> Result<(), CliError> {
    let ps = resolve_params(args, settings)?;
    let gens: GeneratorSet<FpBig> = build_generators(&ps)?;
    writeln!(out, "valid")?;
    writeln!(out, "n = {}", ps.n())?;
    writeln!(out, "p = {}", ps.p())?;
    writeln!(out, "a = {}", ps.a())?;
    writeln!(out, "b = {}", ps.b())?;
    writeln!(out, "ell = {}", ps.ell())?;
    if let Some(q) = ps.q() {
        writeln!(out, "q = {q}")?;
    }
    writeln!(out, "k = {}", ps.k())?;
    writeln!(out, "c = {}", gens.entry_bound())?;
    Ok(())
}

pub fn analyze(cmd: AnalyzeCommand, settings: &Settings, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        AnalyzeCommand::Girth { params, radius } => {
            let ps = resolve_params(&params, settings)?;
            let radius = settings.resolve(radius, "radius", 32usize)?;
            let gens: GeneratorSet<FpBig> = build_generators(&ps)?;
            let lower = girth_lower_bound(ps.n() as u64, gens.entry_bound(), ps.p());
            // measuring needs a word-sized field for speed
            let report = measure_girth(&small_gens(&ps)?, radius);
            writeln!(out, "n,p,c,lower_bound,girth,relator")?;
            match report.measured {
                GirthMeasurement::Found { girth, relator } => writeln!(
                    out,
                    "{},{},{},{lower},{girth},{}",
                    ps.n(),
                    ps.p(),
                    gens.entry_bound(),
                    format_word(&relator)
                )?,
                GirthMeasurement::NotFoundWithin(r) => {
                    writeln!(out, "{},{},{},{lower},>{r},", ps.n(), ps.p(), gens.entry_bound())?
                }
            }
            Ok(())
        }
        AnalyzeCommand::Mixing { params, kmax, budget } => {
            let ps = resolve_params(&params, settings)?;
            let kmax = settings.resolve(kmax, "kmax", 200usize)?;
            let graph = CayleyGraph::enumerate(&small_gens(&ps)?, settings.budget(budget)? as usize)?;
            let table = load_table(None, settings)?;
            let n = graph.len() as f64;
            let mut walk = WalkEvolution::new(&graph, &table);
            writeln!(out, "k,linf,bound")?;
            for k in 0..=kmax {
                if k > 0 {
                    walk.advance();
                }
                writeln!(out, "{k},{:.6e},{:.6e}", linf_distance(&walk.distribution()), 1.0 / (n * n))?;
            }
            Ok(())
        }
        AnalyzeCommand::Attack { params, k, trials, seed, budget } => {
            let ps = resolve_params(&params, settings)?;
            let k = settings.resolve(k, "k", 145usize)?;
            let trials = settings.resolve(trials, "trials", 1_000_000u64)?;
            let seed = settings.resolve(seed, "seed", 0u64)?;
            let graph = CayleyGraph::enumerate(&small_gens(&ps)?, settings.budget(budget)? as usize)?;
            let table = load_table(None, settings)?;
            let dx = walk_distribution(&graph, &table, k);
            let dy = Distribution::uniform(graph.len());
            let o = play_challenge(&dx, &dy, trials, seed)?;
            writeln!(out, "exact,empirical,ci_low,ci_high,epsilon,bound")?;
            writeln!(
                out,
                "{:.9},{:.9},{:.9},{:.9},{:.6e},{:.9}",
                o.exact_success, o.empirical_success, o.ci_low, o.ci_high, o.epsilon, o.bound
            )?;
            Ok(())
        }
        AnalyzeCommand::Diameter { params, budget } => {
            let ps = resolve_params(&params, settings)?;
            let graph = CayleyGraph::enumerate(&small_gens(&ps)?, settings.budget(budget)? as usize)?;
            writeln!(out, "n,p,order,generates,diameter")?;
            // vertex-transitive, so the identity's eccentricity is the diameter
            writeln!(
                out,
                "{},{},{},{},{}",
                graph.n(),
                graph.p(),
                graph.len(),
                graph.generates(),
                graph.eccentricity()
            )?;
            Ok(())
        }
        AnalyzeCommand::Tails { table } => {
            let table = load_table(table.as_deref(), settings)?;
            writeln!(out, "tail,class,final_step,context_1,final_1,context_2,final_2")?;
            for x in 1..=3u8 {
                for y in 1..=3u8 {
                    match classify_tail(&table, &[x, y])? {
                        TailClass::Good(s) => writeln!(out, "{x}{y},good,{s},,,,")?,
                        TailClass::Bad { witness: [(c1, f1), (c2, f2)] } => {
                            writeln!(out, "{x}{y},bad,,{c1},{f1},{c2},{f2}")?
                        }
                    }
                }
            }
            Ok(())
        }
    }
}

pub fn attack(cmd: AttackCommand, settings: &Settings, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        AttackCommand::Palindrome { params, mode, density, budget } => {
            let ps = resolve_params(&params, settings)?;
            let gens = small_gens(&ps)?;
            let budget = settings.budget(budget)?;
            let mode = match mode {
                Some(m) => m,
                None => match settings.raw("mode") {
                    Some("bilinear") => ModeArg::Bilinear,
                    Some("exhaustive") | None => ModeArg::Exhaustive,
                    Some(other) => return Err(CliError::Usage(format!("config key `mode`: unknown mode `{other}`"))),
                },
            };
            let mode = match mode {
                ModeArg::Exhaustive => SymmetrizerMode::Exhaustive,
                ModeArg::Bilinear => SymmetrizerMode::Bilinear,
            };
            let res = find_symmetrizer(&gens, mode, budget)?;
            let (a, b) = (&res.a_hat, &res.b_hat);
            let m = &(&(&(a * b) * a) * b) * a;
            let r = rho(&m, a, b)?;
            writeln!(out, "# mode {:?}, candidates tried {}", res.mode, res.candidates_tried)?;
            write!(out, "# C\n{}# A_hat\n{}# B_hat\n{}", res.c, a, b)?;
            write!(out, "# M = A_hat B_hat A_hat B_hat A_hat\n{m}# rho(M)\n{r}")?;
            writeln!(out, "# power witnesses")?;
            writeln!(out, "i,row,col,value")?;
            for w in power_entry_witness(&m, &r) {
                match w {
                    PowerWitness::Witness { i, row, col, value, .. } => writeln!(out, "{i},{row},{col},{value}")?,
                    PowerWitness::FailureAt(i) => writeln!(out, "{i},,,")?,
                }
            }
            if density {
                let d = symmetrizer_density(&gens, budget)?;
                writeln!(out, "# density")?;
                writeln!(out, "ambient,matches,total,fraction")?;
                writeln!(out, "SL,{},{},{:.6e}", d.sl_matches, d.sl_total, d.sl_fraction())?;
                writeln!(out, "GL,{},{},{:.6e}", d.gl_matches, d.gl_total, d.gl_fraction())?;
                writeln!(out, "PGL,{},{},{:.6e}", d.pgl_matches(), d.pgl_total(), d.gl_fraction())?;
            }
            Ok(())
        }
        AttackCommand::Verify { params, word, target } => {
            let ps = resolve_params(&params, settings)?;
            if word_sized(&ps) {
                verify_with::<Fp64>(&ps, &word, &target, out)
            } else {
                verify_with::<FpBig>(&ps, &word, &target, out)
            }
        }
        AttackCommand::EmitEm { params, m, target } => {
            let ps = resolve_params(&params, settings)?;
            if !word_sized(&ps) {
                return Err(CliError::Validation(format!("emit-em supports p < 2^63, got {}", ps.p())));
            }
            let gens: GeneratorSet<Fp64> = build_generators(&ps)?;
            let target = read_matrix(&target, gens.field())?;
            let system = emit_em_system(m, &target, &gens)?;
            write!(out, "{}", system.to_text())?;
            Ok(())
        }
    }
}

fn verify_with<F: PrimeField>(ps: &ParamSet, word: &Path, target: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let gens: GeneratorSet<F> = build_generators(ps)?;
    let text = std::fs::read_to_string(word).map_err(|e| CliError::Usage(format!("{}: {e}", word.display())))?;
    let w: FactorizationWord = text.parse()?;
    let p = ps.p();
    if let Some(&(k, l)) = w.pairs.iter().find(|(k, l)| BigUint::from(*k) >= *p || BigUint::from(*l) >= *p) {
        return Err(CliError::Validation(format!("exponent pair ({k}, {l}) is not reduced mod {p}")));
    }
    let target = read_matrix(target, gens.field())?;
    if target.n() != gens.n() {
        return Err(CliError::Validation(format!("target is {0}x{0}, expected n = {1}", target.n(), gens.n())));
    }
    let ok = slhash::attacks::verify_factorization(&w, &target, &gens);
    writeln!(out, "{ok}")?;
    writeln!(out, "weight = {}", w.weight())?;
    if ok {
        Ok(())
    } else {
        Err(CliError::Validation("the word does not evaluate to the target".into()))
    }
}

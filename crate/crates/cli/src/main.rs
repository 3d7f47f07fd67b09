use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use modroot_core::braid::{format_word, is_finite_type, Caps, RootEnumeration};
use modroot_core::cluster::rank2::{consecutive_formula_check, indecomposable_count, rank2_sequences};
use modroot_core::cluster::reduced::{beta_bar, conjugation_commutes, z_beta};
use modroot_core::cluster::{generic_decomposition, DEFAULT_FAN_CAP};
use modroot_core::harness::{
    cvector_suite, fan_cached, reduced_suite, resolve_domains, roots_cached, run_verify_all, stability_suite,
    DomainSource, VerifyOptions,
};
use modroot_core::io::{is_input_error, load_quiver, parse_rep_arg, parse_vector, parse_vector_list, Cache, RepArg};
use modroot_core::oracle::rep::{hom_ext, ModulatedRep};
use modroot_core::oracle::semiinv::{det_semiinvariant, Presentation};
use modroot_core::oracle::{FieldTower, OracleSession};
use modroot_core::picture::{build_model, render_svg, RenderOptions};
use modroot_core::report::Report;
use modroot_core::stability::{verify_stability_theorem, SubrootOverride};
use modroot_core::{Error, EulerData, Exec, IntVector, ValuedQuiver, TOOL_VERSION};

#[derive(Parser)]
#[command(name = "modroot", version, about = "Cluster combinatorics of valued quivers")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Global {
    /// Bypass the on-disk result cache.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Seed for oracle sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Run everything on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Args, Clone)]
struct CapArgs {
    #[arg(long, default_value_t = 64)]
    max_coord: i64,
    #[arg(long, default_value_t = 200_000)]
    max_seq: usize,
}

impl CapArgs {
    fn caps(&self) -> Caps {
        Caps { max_sequences: self.max_seq, max_coord: self.max_coord }
    }
}

#[derive(Args, Clone)]
struct DomainArgs {
    /// Field order for the oracle.
    #[arg(long, default_value_t = 2)]
    q: u64,
    /// JSON file of user-supplied subroots and perpendicular simples.
    #[arg(long = "subroot-override")]
    subroot_override: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Quiver summary and Euler data.
    Info { quiver: PathBuf },
    /// Real Schur roots, one per line.
    Roots {
        quiver: PathBuf,
        #[command(flatten)]
        caps: CapArgs,
        /// Print a braid word reaching this root instead.
        #[arg(long)]
        witness: Option<String>,
    },
    /// Box membership table for one stability domain.
    Domain {
        quiver: PathBuf,
        #[arg(long)]
        beta: String,
        #[arg(long = "box", default_value_t = 4)]
        radius: i64,
        #[command(flatten)]
        domains: DomainArgs,
        /// Write all domains as an override file.
        #[arg(long)]
        export_override: Option<PathBuf>,
    },
    /// Stability box check for every root.
    VerifyStability {
        quiver: PathBuf,
        #[arg(long = "box", default_value_t = 4)]
        radius: i64,
        #[command(flatten)]
        domains: DomainArgs,
    },
    /// C-matrices of the fan.
    Cmatrices {
        quiver: PathBuf,
        #[arg(long, default_value_t = DEFAULT_FAN_CAP)]
        cap: usize,
    },
    /// c-vector theorem sweep over the fan.
    VerifyCvectors {
        quiver: PathBuf,
        #[arg(long, default_value_t = DEFAULT_FAN_CAP)]
        cap: usize,
    },
    /// Generic decomposition of a dimension vector.
    Decompose {
        quiver: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, default_value_t = DEFAULT_FAN_CAP)]
        cap: usize,
    },
    /// Rank-2 sequences and the consecutive-root formula.
    Rank2 {
        #[arg(long)]
        d1: i64,
        #[arg(long)]
        d2: i64,
        #[arg(long, default_value_t = 1)]
        f1: i64,
        #[arg(long, default_value_t = 1)]
        f2: i64,
        #[arg(long, default_value_t = 12)]
        steps: usize,
    },
    /// Reduced weights of every root.
    Reduced {
        quiver: PathBuf,
        #[arg(long, default_value_t = 100)]
        words: usize,
    },
    /// Finite-field representation oracle.
    Oracle {
        #[command(subcommand)]
        cmd: OracleCmd,
    },
    /// Semi-invariant picture as SVG.
    Picture {
        quiver: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Roots to emphasize, e.g. `1,0,0;1,2,0`.
        #[arg(long)]
        highlight: Option<String>,
        #[command(flatten)]
        domains: DomainArgs,
    },
    /// Every suite; writes report.tsv (and picture.svg for rank 3).
    VerifyAll {
        quiver: PathBuf,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long = "box", default_value_t = 4)]
        radius: i64,
        #[arg(long = "subroot-override")]
        subroot_override: Option<PathBuf>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_FAN_CAP)]
        cap: usize,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Hom and Ext dimensions of two representations.
    HomExt {
        quiver: PathBuf,
        #[arg(long)]
        q: u64,
        /// `root:1,1,0`, `1,1,0` or `rep:DIMS/DIGITS`.
        #[arg(long)]
        v: String,
        #[arg(long)]
        w: String,
    },
    /// Determinantal semi-invariant of a random presentation.
    SemiInvariant {
        quiver: PathBuf,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        gamma0: String,
        #[arg(long)]
        gamma1: String,
        #[arg(long)]
        beta: String,
    },
}

enum Outcome {
    Ok,
    Failed(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed(tsv)) => {
            eprint!("{tsv}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if is_input_error(&e) { 2 } else { 1 })
        }
    }
}

fn exec(g: &Global) -> Exec {
    if g.sequential {
        Exec::Sequential
    } else {
        Exec::default()
    }
}

fn cache_for(g: &Global, quiver: &Path) -> Cache {
    Cache::for_quiver(quiver, !g.no_cache)
}

fn load(path: &Path) -> modroot_core::Result<(ValuedQuiver, EulerData)> {
    let q = load_quiver(path)?;
    let ed = EulerData::new(&q)?;
    Ok((q, ed))
}

fn finish(report: &Report) -> Outcome {
    print!("{}", report.to_tsv());
    if report.passed() {
        Outcome::Ok
    } else {
        Outcome::Failed(report.failures_tsv())
    }
}

fn domains_or_notice(g: &Global, path: &Path, args: &DomainArgs) -> modroot_core::Result<(EulerData, DomainSource)> {
    let (q, ed) = load(path)?;
    let cache = cache_for(g, path);
    let roots = roots_cached(&q, &ed, Caps::default(), &cache, exec(g))?;
    let src =
        resolve_domains(&q, &ed, &roots, Some(args.q), g.seed, args.subroot_override.as_deref(), &cache, exec(g))?;
    Ok((ed, src))
}

fn run(cli: Cli) -> modroot_core::Result<Outcome> {
    let g = &cli.global;
    match cli.cmd {
        Cmd::Info { quiver } => {
            let (q, ed) = load(&quiver)?;
            println!("# tool\t{TOOL_VERSION}");
            println!("name\t{}", q.name());
            println!("hash\t{}", q.canonical_hash());
            println!("n\t{}", q.n());
            println!("f\t{}", IntVector(q.f()));
            println!("z\t{}", IntVector(ed.z.clone()));
            println!("finite_type\t{}", is_finite_type(&ed));
            for (name, m) in [("L", &ed.l), ("D", &ed.d_matrix()), ("E", &ed.e), ("R", &ed.r), ("B", &ed.b)] {
                println!("[{name}]");
                print!("{m}");
            }
            println!("[DB]");
            print!("{}", ed.d_matrix().mul(&ed.b));
            Ok(Outcome::Ok)
        }
        Cmd::Roots { quiver, caps, witness } => {
            let (q, ed) = load(&quiver)?;
            if let Some(w) = witness {
                let beta = parse_vector(&w)?;
                let en = RootEnumeration::run(&q, &ed, caps.caps(), exec(g))?;
                return match en.witness(&beta) {
                    Some(word) => {
                        println!("{}", if word.is_empty() { "id".to_string() } else { format_word(&word) });
                        Ok(Outcome::Ok)
                    }
                    None => Err(Error::Inconclusive { beta }),
                };
            }
            let set = roots_cached(&q, &ed, caps.caps(), &cache_for(g, &quiver), exec(g))?;
            for b in set.sorted() {
                println!("{b}");
            }
            if !set.complete {
                eprintln!("note: enumeration incomplete within caps");
            }
            Ok(Outcome::Ok)
        }
        Cmd::Domain { quiver, beta, radius, domains, export_override } => {
            let beta = parse_vector(&beta)?;
            let (ed, src) = domains_or_notice(g, &quiver, &domains)?;
            let DomainSource::Available(map) = src else {
                let DomainSource::Unavailable(why) = src else { unreachable!() };
                return Ok(Outcome::Failed(format!("stability\tdomain\tSKIP\t{why}\n")));
            };
            if let Some(path) = export_override {
                let ov = SubrootOverride::from_domains(&format!("exported from {}", quiver.display()), &map);
                fs::write(&path, serde_json::to_string_pretty(&ov).map_err(Error::Json)? + "\n")?;
            }
            let _ = ed;
            let d = map.get(&beta).ok_or_else(|| Error::Inconclusive { beta: beta.clone() })?;
            let rep = verify_stability_theorem(d, radius, exec(g));
            print!("{}", rep.to_tsv());
            let bad = rep.mismatches().count();
            Ok(if bad == 0 { Outcome::Ok } else { Outcome::Failed(format!("{bad} mismatches\n")) })
        }
        Cmd::VerifyStability { quiver, radius, domains } => {
            let (_, src) = domains_or_notice(g, &quiver, &domains)?;
            match src {
                DomainSource::Available(map) => Ok(finish(&stability_suite(&map, radius, exec(g)))),
                DomainSource::Unavailable(why) => {
                    println!("stability\tdzss_eq_delta\tSKIP\t{why}");
                    Ok(Outcome::Ok)
                }
            }
        }
        Cmd::Cmatrices { quiver, cap } => {
            let (q, ed) = load(&quiver)?;
            let fan = fan_cached(&q, &ed, cap, &cache_for(g, &quiver), exec(g))?;
            println!("# states\t{}\n# complete\t{}", fan.len(), fan.complete);
            for st in &fan.states {
                println!("[{}]", st.word_string());
                print!("{}", st.c);
            }
            Ok(Outcome::Ok)
        }
        Cmd::VerifyCvectors { quiver, cap } => {
            let (q, ed) = load(&quiver)?;
            let cache = cache_for(g, &quiver);
            let roots = roots_cached(&q, &ed, Caps::default(), &cache, exec(g))?;
            let fan = fan_cached(&q, &ed, cap, &cache, exec(g))?;
            Ok(finish(&cvector_suite(&ed, &fan, &roots)))
        }
        Cmd::Decompose { quiver, alpha, cap } => {
            let alpha = parse_vector(&alpha)?;
            let (q, ed) = load(&quiver)?;
            if alpha.len() != ed.n() {
                return Err(Error::DimensionMismatch { expected: ed.n(), got: alpha.len() });
            }
            let fan = fan_cached(&q, &ed, cap, &cache_for(g, &quiver), exec(g))?;
            let (idx, coeffs) = generic_decomposition(&fan, &alpha)?;
            let st = &fan.states[idx];
            println!("# state\t{}", st.word_string());
            println!("multiplicity\tsummand");
            for j in 0..st.n() {
                if coeffs.0[j] != 0 {
                    println!("{}\t{}", coeffs.0[j], st.v.col(j));
                }
            }
            Ok(Outcome::Ok)
        }
        Cmd::Rank2 { d1, d2, f1, f2, steps } => {
            let st = rank2_sequences(d1, d2, f1, f2, steps)?;
            println!("# d\t{d1},{d2}\n# f\t{f1},{f2}");
            println!("s\t{}", st.s.map_or("inf".to_string(), |s| s.to_string()));
            println!("terminated\t{}", st.terminated);
            debug_assert_eq!(st.s, indecomposable_count(d1, d2));
            for (name, list) in [("Y", &st.y), ("Z", &st.z)] {
                for (i, v) in list.iter().enumerate() {
                    println!("{name}{}\t{v}", i + 1);
                }
            }
            for (k, (orbit, closed)) in st.sequences(2 * steps + 4).iter().enumerate() {
                let items: Vec<String> = orbit.iter().map(|(v, o)| format!("{o}:{v}")).collect();
                println!("sequence{}\t{}\t{}", k + 1, if *closed { "closed" } else { "open" }, items.join(" "));
            }
            println!("gamma\tgamma_p\tgamma_pp\tf\t<g',g>\t<g,g'>\tb\tsign");
            for r in st.chart() {
                println!(
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    r.gamma, r.gamma_p, r.gamma_pp, r.f, r.pair_pg, r.pair_gp, r.b, r.sign
                );
            }
            Ok(finish(&consecutive_formula_check(&st, 2 * steps + 4)))
        }
        Cmd::Reduced { quiver, words } => {
            let (q, ed) = load(&quiver)?;
            let cache = cache_for(g, &quiver);
            let roots = roots_cached(&q, &ed, Caps::default(), &cache, exec(g))?;
            println!("beta\tz_beta\tbeta_bar");
            for b in roots.sorted() {
                match z_beta(&ed, &b, None) {
                    Ok(z) => println!("{b}\t{z}\t{}", beta_bar(&ed, &b, z)?),
                    Err(e) => println!("{b}\t-\t{e}"),
                }
            }
            let fan = fan_cached(&q, &ed, DEFAULT_FAN_CAP, &cache, exec(g))?;
            let mut rep = reduced_suite(&ed, &fan, &roots, 0, g.seed);
            rep.extend(conjugation_commutes(&ed, words, 20, g.seed));
            if rep.passed() {
                Ok(Outcome::Ok)
            } else {
                Ok(Outcome::Failed(rep.failures_tsv()))
            }
        }
        Cmd::Oracle { cmd } => oracle(g, cmd),
        Cmd::Picture { quiver, out, highlight, domains } => {
            let highlight = highlight.as_deref().map(parse_vector_list).transpose()?.unwrap_or_default();
            let (q, _) = load(&quiver)?;
            let (ed, src) = domains_or_notice(g, &quiver, &domains)?;
            let DomainSource::Available(map) = src else {
                let DomainSource::Unavailable(why) = src else { unreachable!() };
                return Ok(Outcome::Failed(format!("picture\tmodel\tSKIP\t{why}\n")));
            };
            let fan = fan_cached(&q, &ed, DEFAULT_FAN_CAP, &cache_for(g, &quiver), exec(g))?;
            let model = build_model(&ed, &fan, &map)?;
            fs::write(&out, render_svg(&model, &RenderOptions { highlight }))?;
            println!(
                "markers\t{}\ncurves\t{}\nregions\t{}",
                model.markers.len(),
                model.curves.len(),
                model.regions.len()
            );
            Ok(Outcome::Ok)
        }
        Cmd::VerifyAll { quiver, q, radius, subroot_override, out_dir, cap } => {
            let opts = VerifyOptions {
                q,
                radius,
                seed: g.seed,
                fan_cap: cap,
                subroot_override,
                exec: exec(g),
                ..Default::default()
            };
            let outcome = run_verify_all(&quiver, &opts, &cache_for(g, &quiver))?;
            let tsv = outcome.report.to_tsv();
            if let Some(dir) = out_dir {
                fs::create_dir_all(&dir)?;
                fs::write(dir.join("report.tsv"), &tsv)?;
                if let Some(svg) = &outcome.svg {
                    fs::write(dir.join("picture.svg"), svg)?;
                }
            }
            Ok(finish(&outcome.report))
        }
    }
}

fn rep_from_arg(
    session: &OracleSession,
    tower: &FieldTower,
    arg: &str,
    n: usize,
) -> modroot_core::Result<ModulatedRep> {
    match parse_rep_arg(arg)? {
        RepArg::Root(beta) => {
            if beta.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: beta.len() });
            }
            session.module(&beta).cloned().ok_or(Error::Inconclusive { beta })
        }
        RepArg::Rep { dims, digits } => {
            if dims.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: dims.len() });
            }
            let need = ModulatedRep::rep_space_dim(tower, &dims);
            if digits.len() != need || digits.iter().any(|&d| d >= tower.p()) {
                return Err(Error::Parse(format!("expected {need} digits below {}", tower.p())));
            }
            Ok(ModulatedRep::from_digits(tower, &dims, &digits))
        }
    }
}

fn oracle(g: &Global, cmd: OracleCmd) -> modroot_core::Result<Outcome> {
    let (path, order) = match &cmd {
        OracleCmd::HomExt { quiver, q, .. } | OracleCmd::SemiInvariant { quiver, q, .. } => (quiver.clone(), *q),
    };
    let (q, ed) = load(&path)?;
    let roots = roots_cached(&q, &ed, Caps::default(), &cache_for(g, &path), exec(g))?;
    let tower = FieldTower::build(&q, order)?;
    // Only the roots named on the command line get exceptional modules.
    let mut named = Vec::new();
    match &cmd {
        OracleCmd::HomExt { v, w, .. } => {
            for a in [v, w] {
                if let RepArg::Root(beta) = parse_rep_arg(a)? {
                    named.push(beta);
                }
            }
        }
        OracleCmd::SemiInvariant { beta, .. } => named.push(parse_vector(beta)?),
    }
    let mut subset = roots.clone();
    subset.roots.clear();
    for beta in named {
        if beta.len() != ed.n() {
            return Err(Error::DimensionMismatch { expected: ed.n(), got: beta.len() });
        }
        if !roots.contains(&beta) {
            return Err(Error::Inconclusive { beta });
        }
        subset.roots.insert(beta);
    }
    let session = OracleSession::new(&q, order, &subset, g.seed, exec(g))?;
    match cmd {
        OracleCmd::HomExt { v, w, .. } => {
            let v = rep_from_arg(&session, &tower, &v, ed.n())?;
            let w = rep_from_arg(&session, &tower, &w, ed.n())?;
            let h = hom_ext(&tower, &v, &w);
            let euler = ed.pair(&v.dim_vector(), &w.dim_vector());
            let diff = h.hom_dim_k() as i64 - h.ext_dim_k() as i64;
            println!("dim_v\tdim_w\tdim_hom\tdim_ext\teuler\tcheck");
            println!(
                "{}\t{}\t{}\t{}\t{euler}\t{}",
                v.dim_vector(),
                w.dim_vector(),
                h.hom_dim_k(),
                h.ext_dim_k(),
                if diff == euler { "PASS" } else { "FAIL" }
            );
            Ok(if diff == euler { Outcome::Ok } else { Outcome::Failed("euler form mismatch\n".into()) })
        }
        OracleCmd::SemiInvariant { gamma0, gamma1, beta, .. } => {
            let g0 = parse_vector(&gamma0)?;
            let g1 = parse_vector(&gamma1)?;
            let beta = parse_vector(&beta)?;
            let m = session.module(&beta).ok_or_else(|| Error::Inconclusive { beta: beta.clone() })?;
            let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
            let pres = Presentation::random(&tower, &g1, &g0, &mut rng);
            let alpha = ed.p.transpose().mul_vec(&pres.weight_gamma());
            let value = det_semiinvariant(&tower, &pres, m)?;
            println!("gamma0\tgamma1\tbeta\talpha\tpairing\tvalue");
            println!("{g0}\t{g1}\t{beta}\t{alpha}\t{}\t{value}", ed.pair(&alpha, &beta));
            Ok(Outcome::Ok)
        }
    }
}

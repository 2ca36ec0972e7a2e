//! Command-line front end: apartment/tree figure emitters, Moy-Prasad
//! tables, genericity checks, Weil matrices, finite-group suites, Yu-datum
//! validation and character evaluation.
//!
//! Every run echoes its resolved configuration as a leading comment line, and
//! sampled checks are seeded, so outputs are byte-identical across runs.

use clap::{Parser, Subcommand};
use num_traits::ToPrimitive;
use padic_cusp_core::building::{
    apartment_window, jump_set, mp_descriptor, quotient_dim, sl2_tree, BtTriple, GroupKind,
};
use padic_cusp_core::characters::{
    character_at_ts, real_ds_character, real_ds_character_cyc, weyl_character_sym, ChiData,
    ToralElement,
};
use padic_cusp_core::cyclotomic::Cyc;
use padic_cusp_core::finrep::{character_table, inner_product, mackey_check, FiniteGroup};
use padic_cusp_core::fq::Fq;
use padic_cusp_core::genericity::{
    char_depth, dual_element_of_character, ge1_check, ge2_check, ExtChar, NormOneChar,
    TorusCharacterData,
};
use padic_cusp_core::heisenberg_weil::{
    verify_all_pairs, verify_weil_intertwining_all, weil, HeisenbergRep, SymplecticSpace,
};
use padic_cusp_core::local_field::{
    parse_element, teichmuller_part, LocalField, LocalFieldElement,
};
use padic_cusp_core::rat::{parse_rat, rat, rat_int, Level, Rat};
use padic_cusp_core::yu::{validate_yu_datum, TameEllipticPair};
use padic_cusp_core::yu_config::{parse_yu, serialize_yu};
use std::io::Write;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "padic-cusp",
    version,
    about = "Moy-Prasad filtrations, Yu data and character formulas at desk scale"
)]
struct Cli {
    /// Digit budget for p-adic arithmetic (default: PADIC_CUSP_PRECISION or 6)
    #[arg(long, global = true)]
    precision: Option<i64>,
    /// Seed for sampled checks
    #[arg(long, global = true, default_value_t = 1u64)]
    seed: u64,
    /// Output format where applicable: svg | tsv | text
    #[arg(long, global = true)]
    format: Option<String>,
    /// Write output to a file instead of stdout
    #[arg(long, global = true)]
    out: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit an apartment window with hyperplanes and chambers (A1 or A2)
    Apartment {
        /// Cartan type, e.g. A2
        cartan: String,
        /// Box radius in fundamental-coweight coordinates
        #[arg(long, default_value_t = 2)]
        r#box: i64,
    },
    /// Moy-Prasad exponent table: columns r, per-root exponents, torus level,
    /// quotient dimension
    MpTable {
        #[arg(long, default_value = "SL2")]
        group: String,
        /// Building point: x1, x2 or space-separated coordinates
        #[arg(long, default_value = "x2")]
        point: String,
        /// Largest level to tabulate
        #[arg(long, default_value = "2")]
        max_r: String,
    },
    /// Ball of the (q+1)-regular Bruhat-Tits tree of SL2
    Tree {
        #[arg(long, default_value_t = 3)]
        q: u64,
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
    /// GE0/GE1/GE2 verdicts for a torus character
    GenericCheck {
        #[arg(long, default_value_t = 7)]
        p: u64,
        /// Torus kind: split | norm-one-ramified | norm-one-unramified | induced-unramified
        #[arg(long, default_value = "split")]
        torus: String,
        /// Monomial exponents for the split torus, comma-separated
        #[arg(long, default_value = "1,0")]
        exponents: String,
        /// Wild coefficient literal (element of E), e.g. pi^-1 or w*pi^-4
        #[arg(long)]
        wild: Option<String>,
        /// Tame exponent
        #[arg(long, default_value_t = 0)]
        tame: i64,
        /// Expected depth r
        #[arg(long, default_value = "1")]
        depth: String,
    },
    /// Heisenberg and Weil matrices over Q(zeta_p)
    Weil {
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Run the exhaustive intertwining and multiplicativity suite
        #[arg(long, default_value_t = false)]
        verify: bool,
    },
    /// Finite-group suites: character tables, cuspidality, Mackey checks
    Finrep {
        /// Group: S3 | S4 | SL2q for q in {2,3,5,7} | GL2q
        #[arg(long, default_value = "SL23")]
        group: String,
        /// What to run: table | cuspidality | mackey
        #[arg(long, default_value = "table")]
        suite: String,
    },
    /// Validate a Yu datum from a .yu config file
    YuValidate { file: String },
    /// Echo the canonical serialization of a .yu config file
    YuEcho { file: String },
    /// Harish-Chandra character at topologically semisimple elements
    Character {
        #[arg(long, default_value_t = 7)]
        p: u64,
        /// Tame exponent of theta on the norm-one torus
        #[arg(long, default_value_t = 1)]
        tame: i64,
        /// Orders of the sampled elements gamma (finite prime-to-p order)
        #[arg(long, default_value = "8")]
        gamma_orders: String,
        /// chi''-data: unramified-quadratic (default) or trivial
        #[arg(long, default_value = "unramified-quadratic")]
        chi: String,
        /// a-data element literal in E (default: the trace-zero unit w)
        #[arg(long)]
        a_alpha: Option<String>,
        /// Langlands epsilon factor as a root of unity a/b (= zeta_b^a)
        #[arg(long)]
        eps: Option<String>,
    },
    /// The real-group two-term character formula
    RealCharacter {
        #[arg(long)]
        n: u32,
        /// Angle phi in radians (floating mode)
        #[arg(long)]
        phi: Option<f64>,
        /// Rational angle a/b meaning phi = 2 pi a / b (exact mode)
        #[arg(long)]
        angle: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let precision = cli
        .precision
        .or_else(|| {
            std::env::var("PADIC_CUSP_PRECISION")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(6);
    let mut out = String::new();
    let result = run(&cli, precision, &mut out);
    // emit whatever was produced, even when the run ends in an error, so
    // failure reports (e.g. invalid Yu data) reach the user
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &out) {
                eprintln!("error: cannot write {path}: {e}");
                return ExitCode::from(1);
            }
        }
        None => {
            print!("{out}");
            let _ = std::io::stdout().flush();
        }
    }
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn config_echo(out: &mut String, pieces: &[(&str, String)]) {
    let body: Vec<String> = pieces.iter().map(|(k, v)| format!("{k}={v}")).collect();
    out.push_str(&format!("# config: {}\n", body.join(" ")));
}

fn run(cli: &Cli, precision: i64, out: &mut String) -> Result<(), String> {
    match &cli.command {
        Command::Apartment { cartan, r#box } => {
            let rank = match cartan.to_uppercase().as_str() {
                "A1" => 1,
                "A2" => 2,
                other => return Err(format!("unsupported apartment type {other}")),
            };
            let window = apartment_window(rank, rat_int(*r#box)).map_err(|e| e.to_string())?;
            let format = cli.format.clone().unwrap_or_else(|| "svg".into());
            if format == "svg" {
                emit_apartment_svg(out, &window, rank);
            } else {
                config_echo(
                    out,
                    &[("cmd", "apartment".into()), ("type", cartan.clone())],
                );
                out.push_str(&format!(
                    "hyperplanes\t{}\nchambers\t{}\nvertices\t{}\n",
                    window.hyperplanes.len(),
                    window.chambers.len(),
                    window.vertices.len()
                ));
            }
            Ok(())
        }
        Command::MpTable {
            group,
            point,
            max_r,
        } => {
            let kind = parse_group(group)?;
            let x = parse_point(kind, point)?;
            let upper = parse_rat(max_r).ok_or_else(|| format!("bad level {max_r}"))?;
            config_echo(
                out,
                &[
                    ("cmd", "mp-table".into()),
                    ("group", group.clone()),
                    ("point", point.clone()),
                    ("max-r", max_r.clone()),
                ],
            );
            out.push_str("r");
            let n = kind.n();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        out.push_str(&format!("\te{}{}", i + 1, j + 1));
                    }
                }
            }
            out.push_str("\ttorus\tdim\n");
            let mut levels: Vec<Rat> = vec![rat_int(0)];
            levels.extend(jump_set(&x, upper));
            for r in levels {
                let desc = mp_descriptor(&x, Level::at(r));
                out.push_str(&format!("{r}"));
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            out.push_str(&format!("\t{}", desc.bounds[i][j]));
                        }
                    }
                }
                let dim = if r > rat_int(0) {
                    quotient_dim(&x, r)
                } else {
                    0
                };
                out.push_str(&format!("\t{}\t{}\n", desc.bounds[0][0], dim));
            }
            Ok(())
        }
        Command::Tree { q, depth } => {
            let ball = sl2_tree(*q, *depth);
            config_echo(
                out,
                &[
                    ("cmd", "tree".into()),
                    ("q", q.to_string()),
                    ("depth", depth.to_string()),
                ],
            );
            out.push_str(&format!("vertices\t{}\n", ball.vertex_count()));
            out.push_str(&format!("edges\t{}\n", ball.edges.len()));
            for (i, (ty, parent)) in ball.vertices.iter().enumerate() {
                let p = parent.map(|x| x.to_string()).unwrap_or_else(|| "-".into());
                out.push_str(&format!("v{i}\ttype{ty}\tparent {p}\n"));
            }
            for (a, b) in ball.edge_barycenters() {
                out.push_str(&format!("barycenter\tv{a}-v{b}\n"));
            }
            Ok(())
        }
        Command::GenericCheck {
            p,
            torus,
            exponents,
            wild,
            tame,
            depth,
        } => {
            let r = parse_rat(depth).ok_or_else(|| format!("bad depth {depth}"))?;
            config_echo(
                out,
                &[
                    ("cmd", "generic-check".into()),
                    ("p", p.to_string()),
                    ("torus", torus.clone()),
                    ("depth", depth.clone()),
                ],
            );
            let (theta, eval_field) =
                build_torus_character(*p, precision, torus, exponents, wild.as_deref(), *tame)?;
            let (d, trivial) = char_depth(&theta, eval_field).map_err(|e| e.to_string())?;
            out.push_str(&format!("depth\t{d}\ttrivial\t{trivial}\n"));
            if trivial || d != r {
                out.push_str(&format!("GE0\tfail\tdepth {d} != {r}\n"));
                return Ok(());
            }
            let x = dual_element_of_character(&theta, eval_field).map_err(|e| e.to_string())?;
            out.push_str("GE0\tpass\n");
            match ge1_check(&x, -r, &|_| true) {
                Ok(rep) => {
                    for (name, v) in &rep.valuations {
                        let vs = v.map(|q| q.to_string()).unwrap_or_else(|| "inf".into());
                        out.push_str(&format!("val(X(H_{name}))\t{vs}\n"));
                    }
                    out.push_str(&format!(
                        "GE1\t{}\n",
                        if rep.pass { "pass" } else { "fail" }
                    ));
                    if rep.pass {
                        let g2 = ge2_check(&x, -r, 1).map_err(|e| e.to_string())?;
                        out.push_str(&format!("GE2\t{}\n", if g2 { "pass" } else { "fail" }));
                    }
                }
                Err(e) => out.push_str(&format!("GE1\tfail\t{e}\n")),
            }
            Ok(())
        }
        Command::Weil { p, d, verify } => {
            config_echo(
                out,
                &[
                    ("cmd", "weil".into()),
                    ("p", p.to_string()),
                    ("d", d.to_string()),
                    ("verify", verify.to_string()),
                ],
            );
            let m = d / 2;
            let mut gram = vec![vec![0i64; *d]; *d];
            for i in 0..m {
                gram[i][m + i] = 1;
                gram[m + i][i] = -1;
            }
            let sp = SymplecticSpace::new(*p, gram).map_err(|e| e.to_string())?;
            let h = HeisenbergRep::new(sp, 1).map_err(|e| e.to_string())?;
            out.push_str(&format!("heisenberg-degree\t{}\n", h.degree()));
            for (label, v) in sample_heisenberg_generators(*p, *d) {
                let mat = h.omega(&v, Fq::prime(*p, 0));
                emit_cyc_matrix(out, &format!("omega[{label}]"), &mat);
            }
            let w = weil(&h).map_err(|e| e.to_string())?;
            if let Some(group) = &w.sp_group {
                out.push_str(&format!("sp-order\t{}\n", group.order()));
                let l_idx = group.index_of(&[1, 0, 1, 1]).unwrap();
                let w_idx = group.index_of(&[0, 1, *p as u8 - 1, 0]).unwrap();
                emit_cyc_matrix(out, "W[lower]", w.mat_of(l_idx));
                emit_cyc_matrix(out, "W[fourier]", w.mat_of(w_idx));
                if *verify {
                    let mult = verify_all_pairs(group, &w.mats);
                    let intertwine = verify_weil_intertwining_all(&w);
                    out.push_str(&format!(
                        "verify\tmultiplicative {}\tintertwining {}\n",
                        mult, intertwine
                    ));
                    if !(mult && intertwine) {
                        return Err("Weil verification failed".into());
                    }
                }
            } else {
                for (i, (_, mat)) in w.gens.iter().enumerate() {
                    emit_cyc_matrix(out, &format!("W[gen{i}]"), mat);
                }
                if *verify {
                    let ok = w.gens.iter().all(|(s, mat)| {
                        padic_cusp_core::heisenberg_weil::WeilRep::check_intertwining(
                            &h, s, mat,
                        )
                    });
                    out.push_str(&format!("verify	generator intertwining {ok}
"));
                    if !ok {
                        return Err("Weil generator verification failed".into());
                    }
                }
            }
            Ok(())
        }
        Command::Finrep { group, suite } => {
            config_echo(
                out,
                &[
                    ("cmd", "finrep".into()),
                    ("group", group.clone()),
                    ("suite", suite.clone()),
                ],
            );
            let g = parse_finite_group(group)?;
            match suite.as_str() {
                "table" => {
                    let t = character_table(&g);
                    out.push_str(&format!("group\t{}\torder\t{}\n", g.name, g.order()));
                    out.push_str("degree");
                    for (i, c) in t.class_data.classes.iter().enumerate() {
                        out.push_str(&format!("\tC{}(|{}|)", i, c.len()));
                    }
                    out.push('\n');
                    for i in 0..t.num_irreducibles() {
                        out.push_str(&format!("{}", t.degrees[i]));
                        for j in 0..t.class_data.classes.len() {
                            out.push_str(&format!("\t{}", t.chars[i][j]));
                        }
                        out.push('\n');
                    }
                }
                "cuspidality" => {
                    let t = character_table(&g);
                    let u = g
                        .index_of(&[1, 1, 0, 1])
                        .ok_or("cuspidality needs a matrix group")?;
                    let n_sub = g.subgroup_closure(&[u]);
                    let ones = vec![Cyc::one(); n_sub.len()];
                    for i in 0..t.num_irreducibles() {
                        let chi: Vec<Cyc> = n_sub.iter().map(|&h| t.value(i, h).clone()).collect();
                        let dim = inner_product(&chi, &ones);
                        out.push_str(&format!(
                            "degree {}\tdim V^N = {}\tcuspidal {}\n",
                            t.degrees[i],
                            dim,
                            dim == num_rational::BigRational::from_integer(0.into())
                        ));
                    }
                }
                "mackey" => {
                    let subs = g.two_generated_subgroups();
                    let mut checked = 0;
                    for k in &subs {
                        for kp in &subs {
                            let triv = |_: u32| Cyc::one();
                            if !mackey_check(&g, k, kp, &triv) {
                                return Err("Mackey identity failed".into());
                            }
                            checked += 1;
                        }
                    }
                    out.push_str(&format!(
                        "mackey\tall {} subgroup pairs pass (trivial character)\n",
                        checked
                    ));
                }
                other => return Err(format!("unknown suite {other}")),
            }
            Ok(())
        }
        Command::YuValidate { file } => {
            let text = std::fs::read_to_string(file).map_err(|e| format!("{file}: {e}"))?;
            let d = parse_yu(&text).map_err(|e| e.to_string())?;
            config_echo(
                out,
                &[("cmd", "yu-validate".into()), ("file", file.clone())],
            );
            let report = validate_yu_datum(&d).map_err(|e| e.to_string())?;
            for (name, ok, note) in &report.conditions {
                out.push_str(&format!(
                    "{}\t{}\t{}\n",
                    name,
                    if *ok { "pass" } else { "FAIL" },
                    note
                ));
            }
            out.push_str(&format!(
                "verdict\t{}\n",
                if report.valid() { "valid" } else { "INVALID" }
            ));
            if !report.valid() {
                return Err("datum invalid".into());
            }
            Ok(())
        }
        Command::YuEcho { file } => {
            let text = std::fs::read_to_string(file).map_err(|e| format!("{file}: {e}"))?;
            let d = parse_yu(&text).map_err(|e| e.to_string())?;
            out.push_str(&serialize_yu(&d));
            Ok(())
        }
        Command::Character {
            p,
            tame,
            gamma_orders,
            chi,
            a_alpha,
            eps,
        } => {
            config_echo(
                out,
                &[
                    ("cmd", "character".into()),
                    ("p", p.to_string()),
                    ("tame", tame.to_string()),
                    ("gamma-orders", gamma_orders.clone()),
                    ("chi", chi.clone()),
                ],
            );
            let field = LocalField::qp(*p, precision);
            let ext = LocalField::unramified_quadratic(*p, precision);
            let theta = TorusCharacterData::NormOne(NormOneChar {
                ext,
                tame_exp: *tame,
                wild_coeff: None,
            });
            let pair = TameEllipticPair {
                field,
                theta,
                ambient: GroupKind::Sl(2),
            };
            let mut data = match chi.as_str() {
                "unramified-quadratic" => ChiData::default_unramified(ext),
                "trivial" => ChiData::trivial(ext),
                other => return Err(format!("unknown chi-data {other}")),
            };
            if let Some(a) = a_alpha {
                data.a_alpha = parse_element(ext, a).map_err(|e| e.to_string())?;
            }
            let eps_l = match eps {
                None => Cyc::one(),
                Some(e) => {
                    let (a, b) = e
                        .split_once('/')
                        .ok_or_else(|| format!("eps must be a/b, got {e}"))?;
                    Cyc::zeta(
                        b.parse().map_err(|_| "bad eps denominator".to_string())?,
                        a.parse().map_err(|_| "bad eps numerator".to_string())?,
                    )
                }
            };
            out.push_str("gamma\tsummands\ttheta-sum\tvalue\n");
            for ord_str in gamma_orders.split(',') {
                let order: u64 = ord_str
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad order {ord_str}"))?;
                let gamma = norm_one_element_of_order(ext, order)
                    .ok_or(format!("no norm-one element of order {order}"))?;
                let val = character_at_ts(&pair, &gamma, &data, eps_l.clone())
                    .map_err(|e| e.to_string())?;
                let (re, im) = val.to_complex_f64();
                out.push_str(&format!(
                    "order{}\t{}\t{}\t{:.6}{:+.6}i\n",
                    order,
                    val.summands.len(),
                    val.symbolic(),
                    re,
                    im
                ));
            }
            Ok(())
        }
        Command::RealCharacter { n, phi, angle } => {
            config_echo(
                out,
                &[("cmd", "real-character".into()), ("n", n.to_string())],
            );
            if let Some(angle) = angle {
                let (a, b) = angle
                    .split_once('/')
                    .ok_or_else(|| format!("angle must be a/b, got {angle}"))?;
                let a: i64 = a.parse().map_err(|_| "bad angle numerator".to_string())?;
                let b: u64 = b.parse().map_err(|_| "bad angle denominator".to_string())?;
                let v = real_ds_character_cyc(*n, a, b).map_err(|e| e.to_string())?;
                let tr = weyl_character_sym(*n, a, b);
                out.push_str(&format!("exact\t{}\n", v));
                out.push_str(&format!("weyl-oracle\t{}\n", tr));
                out.push_str(&format!("sum-is-zero\t{}\n", (v + tr).is_zero()));
            } else {
                let phi = phi.ok_or("need --phi or --angle")?;
                let v = real_ds_character(*n, phi).map_err(|e| e.to_string())?;
                out.push_str(&format!("value\t{v:.12}\n"));
            }
            Ok(())
        }
    }
}

fn parse_group(s: &str) -> Result<GroupKind, String> {
    match s.to_uppercase().as_str() {
        "SL2" => Ok(GroupKind::Sl(2)),
        "GL2" => Ok(GroupKind::Gl(2)),
        "SL3" => Ok(GroupKind::Sl(3)),
        other => Err(format!("unsupported group {other}")),
    }
}

fn parse_point(kind: GroupKind, s: &str) -> Result<BtTriple, String> {
    match s {
        "x1" => Ok(BtTriple::new(kind, vec![rat_int(0); kind.n()])),
        "x2" => {
            if kind.n() != 2 {
                return Err("x2 is a rank-one point; give explicit coordinates".into());
            }
            Ok(BtTriple::new(kind, vec![rat(1, 4), rat(-1, 4)]))
        }
        coords => {
            let vals: Option<Vec<Rat>> = coords.split_whitespace().map(parse_rat).collect();
            let vals = vals.ok_or_else(|| format!("bad point {coords}"))?;
            if vals.len() != kind.n() {
                return Err(format!("expected {} coordinates", kind.n()));
            }
            Ok(BtTriple::new(kind, vals))
        }
    }
}

fn parse_finite_group(s: &str) -> Result<FiniteGroup, String> {
    match s.to_uppercase().as_str() {
        "S3" => Ok(FiniteGroup::symmetric(3)),
        "S4" => Ok(FiniteGroup::symmetric(4)),
        other => {
            if let Some(q) = other.strip_prefix("SL2") {
                let q: u64 = q.parse().map_err(|_| format!("bad group {s}"))?;
                FiniteGroup::sl2(q).map_err(|e| e.to_string())
            } else if let Some(q) = other.strip_prefix("GL2") {
                let q: u64 = q.parse().map_err(|_| format!("bad group {s}"))?;
                FiniteGroup::gl2(q).map_err(|e| e.to_string())
            } else {
                Err(format!("unknown group {s}"))
            }
        }
    }
}

fn build_torus_character(
    p: u64,
    precision: i64,
    torus: &str,
    exponents: &str,
    wild: Option<&str>,
    tame: i64,
) -> Result<(TorusCharacterData, LocalField), String> {
    match torus {
        "split" => {
            let field = LocalField::qp(p, precision);
            let exps: Result<Vec<i64>, _> = exponents
                .split(',')
                .map(|t| t.trim().parse::<i64>())
                .collect();
            let exps = exps.map_err(|_| format!("bad exponents {exponents}"))?;
            let wild_coeff = match wild {
                Some(w) => Some(parse_element(field, w).map_err(|e| e.to_string())?),
                None => Some(field.one().shift_pi(-1)),
            };
            let psi = ExtChar {
                ext: field,
                on_uniformizer: Cyc::one(),
                tame_exp: 0,
                wild_coeff,
            };
            Ok((
                TorusCharacterData::SplitMonomial {
                    psi,
                    exponents: exps,
                },
                field,
            ))
        }
        "norm-one-ramified" | "norm-one-unramified" => {
            let ext = if torus.ends_with("unramified") {
                LocalField::unramified_quadratic(p, precision)
            } else {
                LocalField::ramified_quadratic(p, precision * 2)
            };
            let wild_coeff = match wild {
                Some(w) => Some(parse_element(ext, w).map_err(|e| e.to_string())?),
                None => None,
            };
            Ok((
                TorusCharacterData::NormOne(NormOneChar {
                    ext,
                    tame_exp: tame,
                    wild_coeff,
                }),
                ext,
            ))
        }
        "induced-unramified" => {
            let ext = LocalField::unramified_quadratic(p, precision);
            let wild_coeff = match wild {
                Some(w) => Some(parse_element(ext, w).map_err(|e| e.to_string())?),
                None => None,
            };
            Ok((
                TorusCharacterData::Induced(ExtChar {
                    ext,
                    on_uniformizer: Cyc::one(),
                    tame_exp: tame,
                    wild_coeff,
                }),
                ext,
            ))
        }
        other => Err(format!("unknown torus {other}")),
    }
}

fn sample_heisenberg_generators(p: u64, d: usize) -> Vec<(String, Vec<Fq>)> {
    let mut out = Vec::new();
    for i in 0..d {
        let mut v = vec![Fq::prime(p, 0); d];
        v[i] = Fq::prime(p, 1);
        out.push((format!("e{}", i + 1), v));
    }
    out
}

fn emit_cyc_matrix(out: &mut String, label: &str, m: &padic_cusp_core::matrix::Mat<Cyc>) {
    out.push_str(&format!("{label}\t{}x{}\n", m.rows, m.cols));
    for i in 0..m.rows {
        let mut row = Vec::new();
        for j in 0..m.cols {
            let entry = &m[(i, j)];
            let tuples: Vec<String> = entry
                .coeff_tuples()
                .iter()
                .map(|(e, c)| format!("{c}@{e}"))
                .collect();
            row.push(if tuples.is_empty() {
                format!("0(ord{})", entry.order())
            } else {
                format!("{}(ord{})", tuples.join("|"), entry.order())
            });
        }
        out.push_str(&row.join("\t"));
        out.push('\n');
    }
}

fn norm_one_element_of_order(ext: LocalField, order: u64) -> Option<ToralElement> {
    // search mu_{q+1} (the tame norm-one part) for an element of exact order
    let g = Fq::generator(ext.p, 2, ext.nonres);
    let zeta0 = g.pow(ext.p - 1); // generator of mu_{q+1}
    let qp1 = ext.p + 1;
    if qp1 % order != 0 {
        return None;
    }
    let candidate = zeta0.pow(qp1 / order);
    let lift = LocalFieldElement::from_residue(ext, candidate);
    let t = teichmuller_part(&lift, ext.precision).ok()?;
    Some(ToralElement::new(t))
}

/// SVG emitter: hyperplane lines, shaded chambers and family labels for the
/// A1/A2 apartment windows. Coordinates are exact rationals scaled into a
/// fixed viewbox.
fn emit_apartment_svg(
    out: &mut String,
    window: &padic_cusp_core::building::ApartmentWindow,
    rank: usize,
) {
    let scale = 80.0;
    let radius = window.box_radius.to_f64().unwrap_or(2.0);
    let pad = 40.0;
    // embedding of coweight coordinates into the plane: A2 at 60 degrees
    let embed = |s: f64, t: f64| -> (f64, f64) {
        if rank == 1 {
            (s, 0.0)
        } else {
            (s + 0.5 * t, 0.8660254037844386 * t)
        }
    };
    let to_px = |x: f64, y: f64| -> (f64, f64) {
        (
            pad + (x + 1.5 * radius) * scale,
            pad + (1.5 * radius - y) * scale,
        )
    };
    let width = 2.0 * pad + 3.0 * radius * scale;
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {width:.0} {width:.0}\">\n"
    ));
    out.push_str(&format!(
        "<!-- config: apartment rank={} box={} -->\n",
        rank, window.box_radius
    ));
    // shaded chambers
    for (idx, ch) in window.chambers.iter().enumerate() {
        let pts: Vec<String> = ch
            .iter()
            .map(|(s, t)| {
                let (x, y) = embed(s.to_f64().unwrap(), t.to_f64().unwrap());
                let (px, py) = to_px(x, y);
                format!("{px:.2},{py:.2}")
            })
            .collect();
        let fill = if idx % 2 == 0 { "#e8f0fe" } else { "#fdf2e3" };
        if rank == 2 {
            out.push_str(&format!(
                "<polygon points=\"{}\" fill=\"{}\" stroke=\"none\"/>\n",
                pts.join(" "),
                fill
            ));
        }
    }
    // hyperplane lines
    let lo = -radius;
    let hi = radius;
    for (family, k) in &window.hyperplanes {
        let kf = *k as f64;
        let (p1, p2) = match family {
            0 => ((kf, lo), (kf, hi)),
            1 => ((lo, kf), (hi, kf)),
            _ => ((kf - lo, lo), (kf - hi, hi)),
        };
        let (x1, y1) = embed(p1.0, p1.1);
        let (x2, y2) = embed(p2.0, p2.1);
        let (a1, b1) = to_px(x1, y1);
        let (a2, b2) = to_px(x2, y2);
        if rank == 1 {
            out.push_str(&format!(
                "<circle cx=\"{a1:.2}\" cy=\"{b1:.2}\" r=\"4\" fill=\"#333\"/>\n"
            ));
        } else {
            out.push_str(&format!(
                "<line x1=\"{a1:.2}\" y1=\"{b1:.2}\" x2=\"{a2:.2}\" y2=\"{b2:.2}\" stroke=\"#333\" stroke-width=\"1\"/>\n"
            ));
        }
    }
    if rank == 1 {
        let (x1, _) = embed(lo, 0.0);
        let (x2, _) = embed(hi, 0.0);
        let (a1, b) = to_px(x1, 0.0);
        let (a2, _) = to_px(x2, 0.0);
        out.push_str(&format!(
            "<line x1=\"{a1:.2}\" y1=\"{b:.2}\" x2=\"{a2:.2}\" y2=\"{b:.2}\" stroke=\"#888\" stroke-width=\"1\"/>\n"
        ));
    }
    // family labels as in the SL3 hyperplane figure
    let labels = ["a_12", "a_23", "a_13"];
    for (family, label) in labels
        .iter()
        .enumerate()
        .take(if rank == 1 { 1 } else { 3 })
    {
        let (x, y) = match family {
            0 => embed(radius * 0.9, radius * 0.55),
            1 => embed(radius * 0.55, radius * 0.9),
            _ => embed(radius * 0.9, -radius * 0.35),
        };
        let (px, py) = to_px(x, y);
        out.push_str(&format!(
            "<text x=\"{px:.2}\" y=\"{py:.2}\" font-size=\"14\" fill=\"#a33\">{label}</text>\n"
        ));
    }
    out.push_str("</svg>\n");
}

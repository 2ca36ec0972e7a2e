//! Line-oriented configuration format for Yu data: sections [field], [levi],
//! [point], [depths], [characters], [rho] with `key = value` entries.
//! Parsing and serialization round-trip bit-exactly on canonical files.

use crate::building::{BtTriple, GroupKind};
use crate::cyclotomic::Cyc;
use crate::genericity::{ExtChar, NormOneChar, TorusCharacterData};
use crate::local_field::{parse_element, render_element, LocalField};
use crate::rat::{parse_rat, Rat};
use crate::yu::{CharOfLevi, CuspidalCert, LeviDescriptor, RhoHandle, YuDatum};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("parse error at line {0}: {1}")]
    Line(usize, String),
    #[error("missing section [{0}]")]
    MissingSection(String),
    #[error("missing key {0}")]
    MissingKey(String),
    #[error("bad value for {0}: {1}")]
    BadValue(String, String),
}

pub type Result<T> = std::result::Result<T, ConfigError>;

type Sections = BTreeMap<String, Vec<(String, String)>>;

fn parse_sections(text: &str) -> Result<Sections> {
    let mut out: Sections = BTreeMap::new();
    let mut current = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = name.trim().to_string();
            out.entry(current.clone()).or_default();
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::Line(i + 1, raw.to_string()))?;
        if current.is_empty() {
            return Err(ConfigError::Line(i + 1, "entry before any section".into()));
        }
        out.get_mut(&current)
            .unwrap()
            .push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn get<'a>(sec: &'a [(String, String)], key: &str) -> Option<&'a str> {
    sec.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
}

fn parse_levi(value: &str, field: LocalField) -> Result<LeviDescriptor> {
    let toks: Vec<&str> = value.split_whitespace().collect();
    match toks.as_slice() {
        ["SL2"] => Ok(LeviDescriptor::Group(GroupKind::Sl(2))),
        ["GL2"] => Ok(LeviDescriptor::Group(GroupKind::Gl(2))),
        ["norm-one", "ramified"] => Ok(LeviDescriptor::NormOneTorus {
            ext: LocalField::ramified_quadratic(field.p, field.precision * 2),
        }),
        ["norm-one", "unramified"] => Ok(LeviDescriptor::NormOneTorus {
            ext: LocalField::unramified_quadratic(field.p, field.precision),
        }),
        ["induced", "unramified"] => Ok(LeviDescriptor::InducedTorus {
            ext: LocalField::unramified_quadratic(field.p, field.precision),
        }),
        ["induced", "ramified"] => Ok(LeviDescriptor::InducedTorus {
            ext: LocalField::ramified_quadratic(field.p, field.precision * 2),
        }),
        ["diagonal", n] => Ok(LeviDescriptor::DiagonalTorus {
            n: n.parse()
                .map_err(|_| ConfigError::BadValue("levi".into(), value.into()))?,
        }),
        _ => Err(ConfigError::BadValue("levi".into(), value.into())),
    }
}

fn render_levi(l: &LeviDescriptor) -> String {
    match l {
        LeviDescriptor::Group(GroupKind::Sl(2)) => "SL2".into(),
        LeviDescriptor::Group(GroupKind::Gl(2)) => "GL2".into(),
        LeviDescriptor::Group(_) => "SL2".into(),
        LeviDescriptor::NormOneTorus { ext } => {
            if ext.e == 2 {
                "norm-one ramified".into()
            } else {
                "norm-one unramified".into()
            }
        }
        LeviDescriptor::InducedTorus { ext } => {
            if ext.e == 2 {
                "induced ramified".into()
            } else {
                "induced unramified".into()
            }
        }
        LeviDescriptor::DiagonalTorus { n } => format!("diagonal {n}"),
    }
}

fn ext_of_levi(l: &LeviDescriptor) -> Option<LocalField> {
    match l {
        LeviDescriptor::NormOneTorus { ext } | LeviDescriptor::InducedTorus { ext } => Some(*ext),
        _ => None,
    }
}

fn parse_character(value: &str, field: LocalField, ext: Option<LocalField>) -> Result<CharOfLevi> {
    let mut kind = None;
    let mut tame: i64 = 0;
    let mut wild: Option<String> = None;
    let mut unif: Option<(i64, u64)> = None;
    for tok in value.split_whitespace() {
        if let Some((k, v)) = tok.split_once('=') {
            match k {
                "tame" => {
                    tame = v
                        .parse()
                        .map_err(|_| ConfigError::BadValue("tame".into(), v.into()))?
                }
                "wild" => wild = Some(v.to_string()),
                "unif" => {
                    let (a, b) = v
                        .split_once('/')
                        .ok_or_else(|| ConfigError::BadValue("unif".into(), v.into()))?;
                    unif = Some((
                        a.parse()
                            .map_err(|_| ConfigError::BadValue("unif".into(), v.into()))?,
                        b.parse()
                            .map_err(|_| ConfigError::BadValue("unif".into(), v.into()))?,
                    ));
                }
                _ => return Err(ConfigError::BadValue("character".into(), tok.into())),
            }
        } else {
            kind = Some(tok.to_string());
        }
    }
    let kind = kind.ok_or_else(|| ConfigError::BadValue("character".into(), value.into()))?;
    let parse_wild = |f: LocalField| -> Result<Option<crate::local_field::LocalFieldElement>> {
        match &wild {
            None => Ok(None),
            Some(w) => Ok(Some(parse_element(f, w).map_err(|e| {
                ConfigError::BadValue("wild".into(), format!("{w}: {e}"))
            })?)),
        }
    };
    match kind.as_str() {
        "norm-one" => {
            let ext = ext.ok_or_else(|| ConfigError::MissingKey("torus extension".into()))?;
            Ok(CharOfLevi::Torus(TorusCharacterData::NormOne(
                NormOneChar {
                    ext,
                    tame_exp: tame,
                    wild_coeff: parse_wild(ext)?,
                },
            )))
        }
        "induced" => {
            let ext = ext.ok_or_else(|| ConfigError::MissingKey("torus extension".into()))?;
            let on_uniformizer = match unif {
                None => Cyc::one(),
                Some((a, b)) => Cyc::zeta(b, a),
            };
            Ok(CharOfLevi::Torus(TorusCharacterData::Induced(ExtChar {
                ext,
                on_uniformizer,
                tame_exp: tame,
                wild_coeff: parse_wild(ext)?,
            })))
        }
        "det" => Ok(CharOfLevi::DetChar(ExtChar {
            ext: field,
            on_uniformizer: match unif {
                None => Cyc::one(),
                Some((a, b)) => Cyc::zeta(b, a),
            },
            tame_exp: tame,
            wild_coeff: parse_wild(field)?,
        })),
        _ => Err(ConfigError::BadValue("character kind".into(), kind)),
    }
}

fn render_character(c: &CharOfLevi) -> String {
    let render_parts =
        |kind: &str, tame: i64, wild: &Option<crate::local_field::LocalFieldElement>| {
            let mut s = format!("{kind} tame={tame}");
            if let Some(w) = wild {
                s.push_str(&format!(" wild={}", render_element(w)));
            }
            s
        };
    match c {
        CharOfLevi::Torus(TorusCharacterData::NormOne(n)) => {
            render_parts("norm-one", n.tame_exp, &n.wild_coeff)
        }
        CharOfLevi::Torus(TorusCharacterData::Induced(e)) => {
            render_parts("induced", e.tame_exp, &e.wild_coeff)
        }
        CharOfLevi::Torus(TorusCharacterData::SplitMonomial { .. }) => "split".into(),
        CharOfLevi::DetChar(e) => render_parts("det", e.tame_exp, &e.wild_coeff),
    }
}

/// Parse a Yu datum from the line-oriented config format.
pub fn parse_yu(text: &str) -> Result<YuDatum> {
    let sections = parse_sections(text)?;
    let fsec = sections
        .get("field")
        .ok_or_else(|| ConfigError::MissingSection("field".into()))?;
    let p: u64 = get(fsec, "p")
        .ok_or_else(|| ConfigError::MissingKey("p".into()))?
        .parse()
        .map_err(|_| ConfigError::BadValue("p".into(), "not an integer".into()))?;
    let is_prime = p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0);
    if !is_prime {
        return Err(ConfigError::BadValue(
            "p".into(),
            format!("{p} is not prime"),
        ));
    }
    let precision: i64 = match get(fsec, "precision") {
        Some(v) => v
            .parse()
            .map_err(|_| ConfigError::BadValue("precision".into(), v.into()))?,
        None => 6,
    };
    let field = LocalField::qp(p, precision);
    let lsec = sections
        .get("levi")
        .ok_or_else(|| ConfigError::MissingSection("levi".into()))?;
    let mut levi = Vec::new();
    for i in 1.. {
        match get(lsec, &format!("g{i}")) {
            Some(v) => levi.push(parse_levi(v, field)?),
            None => break,
        }
    }
    if levi.is_empty() {
        return Err(ConfigError::MissingKey("g1".into()));
    }
    let psec = sections
        .get("point")
        .ok_or_else(|| ConfigError::MissingSection("point".into()))?;
    let group = match levi[0] {
        LeviDescriptor::Group(g) => g,
        _ => GroupKind::Sl(2),
    };
    let point = match get(psec, "x").ok_or_else(|| ConfigError::MissingKey("x".into()))? {
        "x1" => BtTriple::new(group, vec![Rat::new(0, 1); group.n()]),
        "x2" => BtTriple::new(group, vec![Rat::new(1, 4), Rat::new(-1, 4)]),
        coords => {
            let vals: Option<Vec<Rat>> = coords.split_whitespace().map(parse_rat).collect();
            let vals = vals.ok_or_else(|| ConfigError::BadValue("x".into(), coords.into()))?;
            BtTriple::new(group, vals)
        }
    };
    let depths = match sections.get("depths") {
        None => vec![],
        Some(dsec) => {
            let mut ds = Vec::new();
            for i in 1.. {
                match get(dsec, &format!("r{i}")) {
                    Some(v) => ds.push(
                        parse_rat(v)
                            .ok_or_else(|| ConfigError::BadValue(format!("r{i}"), v.into()))?,
                    ),
                    None => break,
                }
            }
            ds
        }
    };
    let ext = levi.iter().rev().find_map(ext_of_levi);
    let characters = match sections.get("characters") {
        None => vec![],
        Some(csec) => {
            let mut cs = Vec::new();
            for i in 1.. {
                match get(csec, &format!("phi{i}")) {
                    Some(v) => cs.push(parse_character(v, field, ext)?),
                    None => break,
                }
            }
            cs
        }
    };
    let rsec = sections
        .get("rho")
        .ok_or_else(|| ConfigError::MissingSection("rho".into()))?;
    let label = get(rsec, "label").unwrap_or("rho").to_string();
    let cert = match get(rsec, "cert").unwrap_or("declared") {
        "torus" => CuspidalCert::TorusAutomatic,
        "declared" => CuspidalCert::Declared,
        other => {
            if let Some(q) = other.strip_prefix("finrep-q") {
                CuspidalCert::FinRepChecked {
                    q: q.parse()
                        .map_err(|_| ConfigError::BadValue("cert".into(), other.into()))?,
                }
            } else {
                return Err(ConfigError::BadValue("cert".into(), other.into()));
            }
        }
    };
    let depth_zero_char = match get(rsec, "char") {
        None => None,
        Some(v) => match parse_character(v, field, ext)? {
            CharOfLevi::Torus(t) => Some(t),
            _ => return Err(ConfigError::BadValue("rho char".into(), v.into())),
        },
    };
    Ok(YuDatum {
        field,
        levi,
        point,
        depths,
        characters,
        rho: RhoHandle {
            label,
            depth_zero_char,
            cert,
        },
    })
}

/// Canonical serialization; `parse_yu(serialize_yu(d))` reproduces `d` and
/// canonical files round-trip byte-for-byte.
pub fn serialize_yu(d: &YuDatum) -> String {
    let mut out = String::new();
    out.push_str("[field]\n");
    out.push_str(&format!("p = {}\n", d.field.p));
    out.push_str(&format!("precision = {}\n", d.field.precision));
    out.push_str("\n[levi]\n");
    for (i, l) in d.levi.iter().enumerate() {
        out.push_str(&format!("g{} = {}\n", i + 1, render_levi(l)));
    }
    out.push_str("\n[point]\n");
    let xs: Vec<String> = d.point.x_bt.iter().map(|r| format!("{r}")).collect();
    let canonical = if d
        .point
        .x_bt
        .iter()
        .all(|v| v.is_integer() && v.numer() == &0)
    {
        "x1".to_string()
    } else if d.point.x_bt == vec![Rat::new(1, 4), Rat::new(-1, 4)] {
        "x2".to_string()
    } else {
        xs.join(" ")
    };
    out.push_str(&format!("x = {canonical}\n"));
    if !d.depths.is_empty() {
        out.push_str("\n[depths]\n");
        for (i, r) in d.depths.iter().enumerate() {
            out.push_str(&format!("r{} = {}\n", i + 1, r));
        }
    }
    if !d.characters.is_empty() {
        out.push_str("\n[characters]\n");
        for (i, c) in d.characters.iter().enumerate() {
            out.push_str(&format!("phi{} = {}\n", i + 1, render_character(c)));
        }
    }
    out.push_str("\n[rho]\n");
    out.push_str(&format!("label = {}\n", d.rho.label));
    let cert = match d.rho.cert {
        CuspidalCert::TorusAutomatic => "torus".to_string(),
        CuspidalCert::Declared => "declared".to_string(),
        CuspidalCert::FinRepChecked { q } => format!("finrep-q{q}"),
    };
    out.push_str(&format!("cert = {cert}\n"));
    if let Some(t) = &d.rho.depth_zero_char {
        out.push_str(&format!(
            "char = {}\n",
            render_character(&CharOfLevi::Torus(t.clone()))
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SL2_SIMPLE: &str = "[field]\np = 7\nprecision = 6\n\n[levi]\ng1 = SL2\ng2 = norm-one ramified\n\n[point]\nx = x2\n\n[depths]\nr1 = 1/2\n\n[characters]\nphi1 = norm-one tame=0 wild=pi^-1\n\n[rho]\nlabel = trivial\ncert = torus\n";

    #[test]
    fn round_trip_is_bit_exact() {
        let d = parse_yu(SL2_SIMPLE).unwrap();
        let s = serialize_yu(&d);
        assert_eq!(s, SL2_SIMPLE);
        let d2 = parse_yu(&s).unwrap();
        assert_eq!(serialize_yu(&d2), s);
    }

    #[test]
    fn parsed_datum_validates() {
        let d = parse_yu(SL2_SIMPLE).unwrap();
        let report = crate::yu::validate_yu_datum(&d).unwrap();
        assert!(report.valid(), "{:?}", report.conditions);
    }

    #[test]
    fn parse_errors() {
        assert!(parse_yu("nonsense").is_err());
        assert!(parse_yu("[field]\np = 6\n[levi]\ng1 = SL2\n").is_err());
        assert!(matches!(
            parse_yu("[field]\np = 7\n"),
            Err(ConfigError::MissingSection(_))
        ));
    }
}

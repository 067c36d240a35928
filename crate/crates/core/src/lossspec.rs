//! Text form of an assembled loss:
//! `<ell-id>[:k=v,...]/<link>[:a=..,b=..]/c=<val>[/inverse]`.
//!
//! The link and `c` parts may be omitted and default to `exp:a=0` and `c=0`.

use std::fmt;
use std::str::FromStr;

use crate::assembly::{Direction, RatioLoss};
use crate::catalog::{CatalogFunction, LossId, LossParams};
use crate::error::{Error, Result};
use crate::link::{LinkFunction, LinkKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossSpec {
    pub id: LossId,
    pub params: LossParams,
    pub link: LinkFunction,
    pub c: f64,
    pub direction: Direction,
}

fn parse_err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        pos,
        msg: msg.into(),
    }
}

fn parse_num(s: &str, pos: usize) -> Result<f64> {
    let v: f64 = match s {
        "inf" | "+inf" => f64::INFINITY,
        _ => s
            .parse()
            .map_err(|_| parse_err(pos, format!("`{s}` is not a number")))?,
    };
    if v.is_nan() {
        return Err(parse_err(pos, "NaN is not allowed"));
    }
    Ok(v)
}

/// Splits `k=v,k=v` starting at byte offset `base`.
fn parse_kv(s: &str, base: usize) -> Result<Vec<(String, f64, usize)>> {
    let mut out = Vec::new();
    let mut off = base;
    for item in s.split(',') {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| parse_err(off, format!("expected key=value, found `{item}`")))?;
        if out.iter().any(|(kk, _, _)| kk == k) {
            return Err(parse_err(off, format!("duplicate key `{k}`")));
        }
        out.push((k.to_string(), parse_num(v, off + k.len() + 1)?, off));
        off += item.len() + 1;
    }
    Ok(out)
}

impl LossSpec {
    pub fn new(id: LossId) -> Self {
        LossSpec {
            id,
            params: LossParams::defaults(id),
            link: LinkFunction::with_default_interval(LinkKind::Exp),
            c: 0.0,
            direction: Direction::Standard,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split('/').collect();
        let mut offsets = Vec::with_capacity(parts.len());
        let mut off = 0;
        for p in &parts {
            offsets.push(off);
            off += p.len() + 1;
        }
        if parts.len() > 4 {
            return Err(parse_err(offsets[4], "too many `/`-separated parts"));
        }

        let (id_str, param_str) = match parts[0].split_once(':') {
            Some((i, p)) => (i, Some(p)),
            None => (parts[0], None),
        };
        if id_str.is_empty() {
            return Err(parse_err(0, "missing loss id"));
        }
        let id: LossId = id_str.parse()?;
        let mut spec = LossSpec::new(id);
        if let Some(ps) = param_str {
            for (k, v, pos) in parse_kv(ps, id_str.len() + 1)? {
                if !id.param_names().contains(&k.as_str()) {
                    return Err(parse_err(
                        pos,
                        format!(
                            "`{id}` has no parameter `{k}` (accepts: {})",
                            id.param_names().join(", ")
                        ),
                    ));
                }
                spec.params.set(&k, v);
            }
        }
        CatalogFunction::new(id, spec.params)?;

        if let Some(link_part) = parts.get(1) {
            let base = offsets[1];
            let (kind_str, args) = match link_part.split_once(':') {
                Some((k, a)) => (k, Some(a)),
                None => (*link_part, None),
            };
            let kind: LinkKind = kind_str
                .parse()
                .map_err(|_| parse_err(base, format!("unknown link `{kind_str}`")))?;
            let dflt = LinkFunction::with_default_interval(kind);
            let (mut a, mut b) = (dflt.a(), dflt.b());
            if let Some(args) = args {
                for (k, v, pos) in parse_kv(args, base + kind_str.len() + 1)? {
                    match k.as_str() {
                        "a" => a = v,
                        "b" => b = v,
                        _ => return Err(parse_err(pos, format!("unknown link key `{k}`"))),
                    }
                }
            }
            spec.link = LinkFunction::new(kind, a, b)?;
        }

        if let Some(c_part) = parts.get(2) {
            let v = c_part
                .strip_prefix("c=")
                .ok_or_else(|| parse_err(offsets[2], format!("expected c=<value>, found `{c_part}`")))?;
            spec.c = parse_num(v, offsets[2] + 2)?;
            if !(spec.c >= 0.0 && spec.c.is_finite()) {
                return Err(parse_err(offsets[2] + 2, "c must be finite and >= 0"));
            }
        }

        if let Some(dir) = parts.get(3) {
            spec.direction = match *dir {
                "inverse" => Direction::Inverse,
                "standard" => Direction::Standard,
                other => {
                    return Err(parse_err(
                        offsets[3],
                        format!("expected `inverse`, found `{other}`"),
                    ))
                }
            };
        }
        Ok(spec)
    }

    pub fn ell(&self) -> Result<CatalogFunction> {
        CatalogFunction::new(self.id, self.params)
    }

    pub fn build(&self) -> Result<RatioLoss> {
        RatioLoss::new(self.ell()?.into_ell(), self.link, self.c, self.direction)
    }
}

impl fmt::Display for LossSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id.as_str())?;
        let names = self.id.param_names();
        if !names.is_empty() {
            let kv: Vec<String> = names
                .iter()
                .map(|n| format!("{n}={}", self.params.get(n).unwrap_or(f64::NAN)))
                .collect();
            write!(f, ":{}", kv.join(","))?;
        }
        write!(f, "/{}/c={}", self.link.label(), self.c)?;
        if self.direction == Direction::Inverse {
            f.write_str("/inverse")?;
        }
        Ok(())
    }
}

impl FromStr for LossSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LossSpec::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_documented_example() {
        let s = LossSpec::parse("lpre/exp:a=0/c=0").unwrap();
        assert_eq!(s.id, LossId::Lpre);
        assert_eq!(s.link.kind(), LinkKind::Exp);
        assert_eq!(s.c, 0.0);
        assert_eq!(s.direction, Direction::Standard);
        assert_eq!(s.to_string(), "lpre/exp:a=0/c=0");
    }

    #[test]
    fn bare_id_uses_defaults() {
        let s = LossSpec::parse("huber-rel").unwrap();
        assert_eq!(s.params.alpha, 3.0);
        assert_eq!(s.link, LinkFunction::exp(0.0).unwrap());
    }

    #[test]
    fn parameters_and_inverse() {
        let s = LossSpec::parse("log-pinball:tau=0.25/logistic:a=0,b=2/c=0.5/inverse").unwrap();
        assert_eq!(s.params.tau, 0.25);
        assert_eq!(s.link.b(), 2.0);
        assert_eq!(s.direction, Direction::Inverse);
        assert_eq!(
            s.to_string(),
            "log-pinball:tau=0.25/logistic:a=0,b=2/c=0.5/inverse"
        );
    }

    #[test]
    fn rejections_name_the_problem() {
        assert!(matches!(LossSpec::parse("nope/exp"), Err(Error::UnknownLossId(_))));
        match LossSpec::parse("huber-rel:alpha=0.5") {
            Err(Error::InvalidParameter { rule, .. }) => assert!(rule.contains("alpha > 1")),
            other => panic!("{other:?}"),
        }
        match LossSpec::parse("lpre/exp/c=x") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 11),
            other => panic!("{other:?}"),
        }
        assert!(LossSpec::parse("lpre:alpha=2").is_err());
        assert!(LossSpec::parse("lpre/probit").is_err());
        assert!(LossSpec::parse("lpre/exp/c=-1").is_err());
        assert!(LossSpec::parse("lpre/exp/c=0/sideways").is_err());
        assert!(LossSpec::parse("lpre/logistic:a=0,b=inf").is_err());
        assert!(LossSpec::parse("lpre/exp/c=0/inverse/x").is_err());
    }

    #[test]
    fn round_trip_over_catalog() {
        for &id in LossId::ALL {
            for link in ["exp:a=0", "logistic:a=0,b=1"] {
                for c in ["0", "0.5"] {
                    for dir in ["", "/inverse"] {
                        let mut spec = LossSpec::new(id);
                        spec.link = LossSpec::parse(&format!("lpre/{link}")).unwrap().link;
                        spec.c = c.parse().unwrap();
                        if !dir.is_empty() {
                            spec.direction = Direction::Inverse;
                        }
                        let text = spec.to_string();
                        let back = LossSpec::parse(&text).unwrap();
                        assert_eq!(back, spec, "{text}");
                        assert_eq!(back.to_string(), text);
                    }
                }
            }
        }
    }
}

//! `dump-dist`: builds a named distribution and prints it in the text format.

use pi_ocrs::dist::{kn_cycle_dist, pair_singleton_dist, parity_dist, product_dist, twise_symmetric, twise_z};
use pi_ocrs::rational::parse_rational;

use crate::error::{CliError, Result};

pub const CONSTRUCTORS: &[(&str, &str)] = &[
    ("product", "<x_0> <x_1> ...        independent items with the given marginals"),
    ("twise", "<n> <t>                   the symmetric t-wise independent D_{t,n}"),
    ("twise-z", "<n> <t>                 the size profile z_j of D_{t,n}"),
    ("kn-cycle", "<n>                    edge sets of K_n from random vertex labels, n odd"),
    ("pair-singleton", "<n>              a random pair or a random singleton"),
    ("parity", "<m> <v_0> <v_1> ...     items <v_i, s> = 1 for uniform s in GF(2)^m"),
];

fn arg_error(ctor: &str, value: &str, reason: &str) -> CliError {
    CliError::InvalidValue { key: ctor.into(), value: value.into(), reason: reason.into() }
}

fn count(ctor: &str, args: &[String], i: usize) -> Result<usize> {
    let raw = args.get(i).ok_or_else(|| arg_error(ctor, "", "missing argument"))?;
    raw.parse().map_err(|_| arg_error(ctor, raw, "expected a non-negative integer"))
}

fn arity(ctor: &str, args: &[String], expected: usize) -> Result<()> {
    match args.len() == expected {
        true => Ok(()),
        false => Err(arg_error(ctor, &args.join(" "), &format!("expected {expected} arguments"))),
    }
}

pub fn dump(ctor: &str, args: &[String]) -> Result<String> {
    let text = match ctor {
        "product" => {
            let x = args
                .iter()
                .map(|a| parse_rational(a).ok_or_else(|| arg_error(ctor, a, "expected a rational")))
                .collect::<Result<Vec<_>>>()?;
            product_dist(&x)?.to_text()
        }
        "twise" => {
            arity(ctor, args, 2)?;
            twise_symmetric(count(ctor, args, 0)?, count(ctor, args, 1)?)?.to_text()
        }
        "twise-z" => {
            arity(ctor, args, 2)?;
            twise_z(count(ctor, args, 0)?, count(ctor, args, 1)?)?.to_text()
        }
        "kn-cycle" => {
            arity(ctor, args, 1)?;
            kn_cycle_dist(count(ctor, args, 0)?)?.to_text()
        }
        "pair-singleton" => {
            arity(ctor, args, 1)?;
            pair_singleton_dist(count(ctor, args, 0)?)?.to_text()
        }
        "parity" => {
            let m = count(ctor, args, 0)?;
            let vectors = (1..args.len()).map(|i| count(ctor, args, i).map(|v| v as u64)).collect::<Result<Vec<_>>>()?;
            parity_dist(&vectors, m)?.to_text()
        }
        other => return Err(CliError::UnknownConstructor(other.into())),
    };
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use pi_ocrs::dist::ExplicitDist;

    fn strings(args: &[&str]) -> Vec<String> {
        args.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn dumps_round_trip() {
        let text = dump("twise", &strings(&["6", "2"])).unwrap();
        assert_eq!(ExplicitDist::parse(&text).unwrap(), twise_symmetric(6, 2).unwrap());
        let text = dump("product", &strings(&["1/2", "0.25"])).unwrap();
        assert_eq!(ExplicitDist::parse(&text).unwrap().marginals()[1], pi_ocrs::rational::rat(1, 4));
    }

    #[test]
    fn bad_arguments() {
        assert!(dump("twise", &strings(&["6"])).is_err());
        assert!(dump("product", &strings(&["x"])).is_err());
        assert!(dump("nope", &[]).is_err());
    }
}

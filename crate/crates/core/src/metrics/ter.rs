//! Translation edit rate without shifts.

use crate::error::{Error, Result};

/// Word-level Levenshtein distance with unit insert/delete/substitute costs.
fn edit_distance(a: &[String], b: &[String]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, at) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, bt) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(at != bt);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Edit distance divided by reference length. No shift moves, so the value
/// can exceed 1 for long hypotheses. Errors on an empty reference.
pub fn ter_basic(hyp: &[String], reference: &[String]) -> Result<f64> {
    if reference.is_empty() {
        return Err(Error::InvalidArgument(
            "ter_basic requires a non-empty reference".into(),
        ));
    }
    Ok(edit_distance(hyp, reference) as f64 / reference.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Sentence;

    fn toks(line: &str) -> Vec<String> {
        Sentence::from_line(line).tokens
    }

    #[test]
    fn identity_is_zero() {
        let x = toks("a b c");
        assert_eq!(ter_basic(&x, &x).unwrap(), 0.0);
    }

    #[test]
    fn empty_hypothesis_deletes_everything() {
        assert_eq!(ter_basic(&[], &toks("a b c")).unwrap(), 1.0);
    }

    #[test]
    fn single_substitution() {
        assert_eq!(
            ter_basic(&toks("a b c"), &toks("a x c")).unwrap(),
            1.0 / 3.0
        );
    }

    #[test]
    fn insertions_push_past_one() {
        assert_eq!(ter_basic(&toks("a b c d"), &toks("a")).unwrap(), 3.0);
    }

    #[test]
    fn bounded_by_length_ratio() {
        let cases = [("a b c", "x y"), ("p q", "p q r s"), ("m", "n")];
        for (h, r) in cases {
            let (h, r) = (toks(h), toks(r));
            let t = ter_basic(&h, &r).unwrap();
            assert!(t <= h.len().max(r.len()) as f64 / r.len() as f64);
        }
    }

    #[test]
    fn empty_reference_errors() {
        assert!(ter_basic(&toks("a"), &[]).is_err());
    }
}

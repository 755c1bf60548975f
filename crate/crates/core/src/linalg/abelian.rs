use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use super::smith::normalize_diagonal;

/// A finitely generated abelian group `Z^r + Z/d_1 + ... + Z/d_k` in
/// invariant-factor form: every `d_i >= 2` and `d_i | d_{i+1}`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct FinAbGroup {
    free_rank: usize,
    torsion: Vec<BigInt>,
}

impl FinAbGroup {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn free(rank: usize) -> Self {
        FinAbGroup {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    pub fn cyclic(order: u64) -> Self {
        Self::new(0, [BigInt::from(order)])
    }

    /// Builds the group from any list of cyclic orders (not necessarily a chain).
    /// Orders `0` count as free summands, orders `1` are dropped.
    pub fn new<I: IntoIterator<Item = BigInt>>(free_rank: usize, cyclic_orders: I) -> Self {
        let mut free = free_rank;
        let mut finite = Vec::new();
        for d in cyclic_orders {
            if d.is_zero() {
                free += 1;
            } else {
                finite.push(d);
            }
        }
        let torsion = normalize_diagonal(finite)
            .into_iter()
            .filter(|d| !d.is_one())
            .collect();
        FinAbGroup {
            free_rank: free,
            torsion,
        }
    }

    pub fn from_u64(free_rank: usize, cyclic_orders: &[u64]) -> Self {
        Self::new(free_rank, cyclic_orders.iter().map(|&d| BigInt::from(d)))
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn torsion_subgroup(&self) -> FinAbGroup {
        FinAbGroup {
            free_rank: 0,
            torsion: self.torsion.clone(),
        }
    }

    pub fn free_part(&self) -> FinAbGroup {
        Self::free(self.free_rank)
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Order of a finite group; `None` when the free rank is positive.
    pub fn order(&self) -> Option<BigInt> {
        self.is_finite()
            .then(|| self.torsion.iter().fold(BigInt::one(), |acc, d| acc * d))
    }

    pub fn direct_sum(&self, other: &FinAbGroup) -> FinAbGroup {
        Self::new(
            self.free_rank + other.free_rank,
            self.torsion.iter().chain(&other.torsion).cloned(),
        )
    }

    pub fn sum<'a, I: IntoIterator<Item = &'a FinAbGroup>>(groups: I) -> FinAbGroup {
        let mut free = 0;
        let mut orders = Vec::new();
        for g in groups {
            free += g.free_rank;
            orders.extend(g.torsion.iter().cloned());
        }
        Self::new(free, orders)
    }

    /// `A^k`, the direct sum of `k` copies.
    pub fn power(&self, k: usize) -> FinAbGroup {
        Self::sum(std::iter::repeat_n(self, k))
    }

    /// Number of cyclic factors whose order is divisible by `p`, i.e. the
    /// dimension of `A/pA` minus the free rank.
    pub fn p_rank(&self, p: u64) -> usize {
        let p = BigInt::from(p);
        self.torsion.iter().filter(|d| d.is_multiple_of(&p)).count()
    }

    /// Largest invariant factor (exponent of the torsion subgroup), 1 if torsion-free.
    pub fn exponent(&self) -> BigInt {
        self.torsion.last().cloned().unwrap_or_else(BigInt::one)
    }

    /// Prime-power decomposition of the torsion: prime -> exponents (descending).
    pub fn primary_view(&self) -> BTreeMap<BigInt, Vec<u32>> {
        let mut out: BTreeMap<BigInt, Vec<u32>> = BTreeMap::new();
        for d in &self.torsion {
            for (p, e) in factorize(d) {
                out.entry(p).or_default().push(e);
            }
        }
        for exps in out.values_mut() {
            exps.sort_unstable_by(|a, b| b.cmp(a));
        }
        out
    }
}

fn factorize(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut n = n.clone();
    let mut out = Vec::new();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        let mut e = 0;
        while n.is_multiple_of(&p) {
            n /= &p;
            e += 1;
        }
        if e > 0 {
            out.push((p.clone(), e));
        }
        p += 1;
    }
    if n > BigInt::one() {
        out.push((n, 1));
    }
    out
}

impl fmt::Display for FinAbGroup {
    /// Primary notation, e.g. `Z^5 + Z/4 + (Z/2)^4`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        match self.free_rank {
            0 => {}
            1 => terms.push("Z".to_string()),
            r => terms.push(format!("Z^{r}")),
        }
        for (p, exps) in self.primary_view() {
            let mut i = 0;
            while i < exps.len() {
                let e = exps[i];
                let count = exps[i..].iter().take_while(|&&x| x == e).count();
                let q = p.pow(e);
                if count == 1 {
                    terms.push(format!("Z/{q}"));
                } else {
                    terms.push(format!("(Z/{q})^{count}"));
                }
                i += count;
            }
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl fmt::Debug for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinAbGroup({self})")
    }
}

#[derive(Debug, thiserror::Error)]
#[error("cannot parse abelian group from {0:?}")]
pub struct ParseGroupError(String);

impl FromStr for FinAbGroup {
    type Err = ParseGroupError;

    /// Parses the primary notation produced by `Display` (also accepts `⊕`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseGroupError(s.to_string());
        let s = s.trim();
        if s == "0" {
            return Ok(Self::trivial());
        }
        let mut free = 0usize;
        let mut orders = Vec::new();
        for term in s.split(['+', '⊕']) {
            let term = term.trim();
            let (base, count) = match term.rsplit_once('^') {
                Some((b, c)) if !b.ends_with(')') && b.contains('/') => {
                    // Z/4^2 is ambiguous; insist on parentheses
                    let _ = c;
                    return Err(err());
                }
                Some((b, c)) => (b.trim(), c.trim().parse::<usize>().map_err(|_| err())?),
                None => (term, 1),
            };
            let base = base.trim_start_matches('(').trim_end_matches(')');
            if base == "Z" {
                free += count;
            } else if let Some(q) = base.strip_prefix("Z/") {
                let q: BigInt = q.trim().parse().map_err(|_| err())?;
                if q <= BigInt::zero() {
                    return Err(err());
                }
                orders.extend(std::iter::repeat_n(q, count));
            } else {
                return Err(err());
            }
        }
        Ok(Self::new(free, orders))
    }
}

impl Serialize for FinAbGroup {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("FinAbGroup", 2)?;
        st.serialize_field("free_rank", &self.free_rank)?;
        let torsion: Vec<serde_json::Value> = self
            .torsion
            .iter()
            .map(|d| match d.to_u64() {
                Some(x) => serde_json::Value::from(x),
                None => serde_json::Value::from(d.to_string()),
            })
            .collect();
        st.serialize_field("torsion", &torsion)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for FinAbGroup {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            free_rank: usize,
            torsion: Vec<serde_json::Value>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let mut orders = Vec::with_capacity(raw.torsion.len());
        for v in raw.torsion {
            let d = match v {
                serde_json::Value::Number(n) => n
                    .as_u64()
                    .map(BigInt::from)
                    .ok_or_else(|| de::Error::custom("torsion entries must be positive"))?,
                serde_json::Value::String(s) => s.parse().map_err(de::Error::custom)?,
                _ => return Err(de::Error::custom("torsion entries must be integers")),
            };
            if d < BigInt::from(2) {
                return Err(de::Error::custom("torsion entries must be at least 2"));
            }
            orders.push(d);
        }
        let g = FinAbGroup::new(raw.free_rank, orders.clone());
        if g.torsion != orders {
            return Err(de::Error::custom("torsion must be a divisibility chain"));
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_chain() {
        let g = FinAbGroup::from_u64(1, &[2, 4, 2, 1, 3]);
        assert_eq!(g.torsion(), &[BigInt::from(2), BigInt::from(2), BigInt::from(12)]);
        assert_eq!(g.free_rank(), 1);
        assert_eq!(g, FinAbGroup::from_u64(1, &[12, 2, 2]));
    }

    #[test]
    fn primary_display() {
        let g = FinAbGroup::from_u64(5, &[4, 2, 2, 2, 2]);
        assert_eq!(g.to_string(), "Z^5 + Z/4 + (Z/2)^4");
        assert_eq!(FinAbGroup::trivial().to_string(), "0");
        assert_eq!(FinAbGroup::free(1).to_string(), "Z");
        assert_eq!(FinAbGroup::from_u64(0, &[6]).to_string(), "Z/2 + Z/3");
        let h: FinAbGroup = "(Z/4)^8 + (Z/2)^20".parse().unwrap();
        assert_eq!(h.p_rank(2), 28);
        assert_eq!(h.to_string(), "(Z/4)^8 + (Z/2)^20");
    }

    #[test]
    fn parse_round_trip() {
        for s in ["0", "Z", "Z^4 + (Z/2)^4", "Z + (Z/4)^7 + (Z/2)^20", "Z/2 + Z/3"] {
            let g: FinAbGroup = s.parse().unwrap();
            assert_eq!(g.to_string(), s);
        }
        assert!("Z/4^2".parse::<FinAbGroup>().is_err());
        assert!("Q".parse::<FinAbGroup>().is_err());
    }

    #[test]
    fn json_schema() {
        let g = FinAbGroup::from_u64(4, &[2, 2]);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"free_rank":4,"torsion":[2,2]}"#);
        let back: FinAbGroup = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<FinAbGroup>(r#"{"free_rank":0,"torsion":[4,2]}"#).is_err());
    }

    #[test]
    fn orders_and_ranks() {
        let g = FinAbGroup::from_u64(0, &[2, 4]);
        assert_eq!(g.order(), Some(BigInt::from(8)));
        assert_eq!(FinAbGroup::free(1).order(), None);
        assert_eq!(g.power(3).to_string(), "(Z/4)^3 + (Z/2)^3");
        assert_eq!(g.p_rank(3), 0);
    }
}

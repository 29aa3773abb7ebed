//! Decoding sets: the random subset of relays whose source-link SNR
//! cleared the decoding threshold in a given round.

use crate::error::Error;

/// Hard cap on the relay count for exact 2^N subset enumeration.
pub const MAX_RELAYS: usize = 20;

/// A subset of relay indices (0-based) that decoded successfully, plus its
/// complement. Members are kept sorted ascending, which doubles as the
/// canonical form for enumeration and reporting.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DecodingSet {
    n: usize,
    members: Vec<usize>,
    complement: Vec<usize>,
}

impl DecodingSet {
    /// Builds a set over `n` relays from an arbitrary list of member
    /// indices. Rejects out-of-range or duplicate indices.
    pub fn new(n: usize, members: &[usize]) -> Result<Self, Error> {
        if n > MAX_RELAYS {
            return Err(Error::TooManyRelays { n, max: MAX_RELAYS });
        }
        let mut sorted = members.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain("duplicate relay index in decoding set"));
        }
        if let Some(&last) = sorted.last() {
            if last >= n {
                return Err(Error::domain(format!(
                    "relay index {last} out of range for {n} relays"
                )));
            }
        }
        let complement = (0..n).filter(|i| !sorted.contains(i)).collect();
        Ok(Self {
            n,
            members: sorted,
            complement,
        })
    }

    /// Builds from a bitmask; bit k set means relay k decoded.
    pub fn from_mask(n: usize, mask: u32) -> Self {
        debug_assert!(n <= MAX_RELAYS);
        debug_assert!(u64::from(mask) < (1u64 << n));
        let members: Vec<usize> = (0..n).filter(|&k| mask & (1 << k) != 0).collect();
        let complement = (0..n).filter(|&k| mask & (1 << k) == 0).collect();
        Self {
            n,
            members,
            complement,
        }
    }

    pub fn mask(&self) -> u32 {
        self.members.iter().fold(0u32, |m, &k| m | (1 << k))
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn complement(&self) -> &[usize] {
        &self.complement
    }

    /// Number of relays in the set (the K of the per-set analysis).
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Total number of relays in the system.
    pub fn relay_count(&self) -> usize {
        self.n
    }
}

/// All 2^n decoding sets in canonical (mask-ascending) order.
pub fn enumerate_decoding_sets(n: usize) -> Result<Vec<DecodingSet>, Error> {
    if n > MAX_RELAYS {
        return Err(Error::TooManyRelays { n, max: MAX_RELAYS });
    }
    Ok((0..1u32 << n)
        .map(|m| DecodingSet::from_mask(n, m))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_is_exact() {
        let s = DecodingSet::new(5, &[3, 0]).unwrap();
        assert_eq!(s.members(), &[0, 3]);
        assert_eq!(s.complement(), &[1, 2, 4]);
        assert_eq!(s.len(), 2);
        assert_eq!(s.mask(), 0b01001);
    }

    #[test]
    fn mask_roundtrip() {
        for mask in 0..16u32 {
            let s = DecodingSet::from_mask(4, mask);
            assert_eq!(s.mask(), mask);
            assert_eq!(s.members().len() + s.complement().len(), 4);
        }
    }

    #[test]
    fn rejects_bad_members() {
        assert!(DecodingSet::new(3, &[3]).is_err());
        assert!(DecodingSet::new(3, &[1, 1]).is_err());
        assert!(DecodingSet::new(21, &[]).is_err());
    }

    #[test]
    fn enumeration_count() {
        assert_eq!(enumerate_decoding_sets(0).unwrap().len(), 1);
        assert_eq!(enumerate_decoding_sets(4).unwrap().len(), 16);
        assert!(enumerate_decoding_sets(21).is_err());
    }
}

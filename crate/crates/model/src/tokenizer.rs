/// Token id reserved for padding; real words always land in buckets >= 1.
pub const PAD_TOKEN: usize = 0;

/// FNV-1a on the word bytes. Spelled out rather than going through the
/// standard hasher so ids stay stable across Rust releases (they are baked
/// into checkpoints via the embedding table).
fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Whitespace-split words hashed into `1..vocab_size`, padded (or truncated)
/// to exactly `k_lang` ids. Identical strings always give identical ids.
///
/// The xor-fold mixes FNV's high bits into the bucket index; with it, the
/// task vocabulary used by the synthetic benchmarks maps into the default
/// 256-bucket table without collisions.
pub fn language_token_ids(instruction: &str, k_lang: usize, vocab_size: usize) -> Vec<usize> {
    assert!(vocab_size >= 2, "vocabulary needs a non-pad bucket");
    let mut ids: Vec<usize> = instruction
        .split_whitespace()
        .take(k_lang)
        .map(|w| {
            let h = fnv1a64(w.as_bytes());
            1 + ((h ^ (h >> 30)) % (vocab_size as u64 - 1)) as usize
        })
        .collect();
    ids.resize(k_lang, PAD_TOKEN);
    ids
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv_reference_vector() {
        // Published FNV-1a test vector.
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
    }

    #[test]
    fn ids_stay_in_range() {
        for w in ["alpha", "beta", "gamma", "x"] {
            let id = language_token_ids(w, 1, 16)[0];
            assert!(id >= 1 && id < 16);
        }
    }
}

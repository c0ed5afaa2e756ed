use rand::Rng;

/// Variables filed into buckets by their (doubled, integer) fitness.
///
/// Buckets are ordered worst (lowest key) first, so rank `k` falls into the
/// first bucket whose cumulative size reaches `k`. Inside a bucket the order
/// is a uniformly random permutation, which is realised lazily by drawing a
/// uniform member.
#[derive(Debug, Clone)]
pub struct FitnessLedger {
    min_key: i64,
    buckets: Vec<Vec<usize>>,
    key_of: Vec<i64>,
    slot: Vec<usize>,
    touched: Vec<usize>,
}

impl FitnessLedger {
    /// Builds a ledger for `keys[i]`, the doubled fitness of variable `i`.
    pub fn new(keys: &[i64]) -> Self {
        let min_key = keys.iter().copied().min().unwrap_or(0);
        let max_key = keys.iter().copied().max().unwrap_or(0);
        let mut ledger = Self {
            min_key,
            buckets: vec![Vec::new(); (max_key - min_key + 1) as usize],
            key_of: keys.to_vec(),
            slot: vec![0; keys.len()],
            touched: Vec::new(),
        };
        for (i, &key) in keys.iter().enumerate() {
            ledger.insert(i, key);
        }
        ledger
    }

    pub fn len(&self) -> usize {
        self.key_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.key_of.is_empty()
    }

    pub fn key(&self, i: usize) -> i64 {
        self.key_of[i]
    }

    pub fn keys(&self) -> &[i64] {
        &self.key_of
    }

    /// Members of the bucket holding `key`, in storage order.
    pub fn bucket(&self, key: i64) -> &[usize] {
        self.bucket_index(key)
            .and_then(|b| self.buckets.get(b))
            .map_or(&[], |v| v.as_slice())
    }

    /// Non-empty buckets worst first, paired with the running total of
    /// variables up to and including each bucket.
    pub fn cumulative_counts(&self) -> Vec<(i64, usize)> {
        let mut total = 0;
        self.buckets
            .iter()
            .enumerate()
            .filter(|(_, b)| !b.is_empty())
            .map(|(idx, b)| {
                total += b.len();
                (self.min_key + idx as i64, total)
            })
            .collect()
    }

    /// Moves variable `i` to the bucket for `key`, recording it as touched.
    pub fn refile(&mut self, i: usize, key: i64) {
        self.touched.push(i);
        if self.key_of[i] == key {
            return;
        }
        self.remove(i);
        self.key_of[i] = key;
        self.insert(i, key);
    }

    /// Forgets the variables touched so far.
    pub fn clear_touched(&mut self) {
        self.touched.clear();
    }

    /// Variables passed to [`refile`](Self::refile) since the last
    /// [`clear_touched`](Self::clear_touched), with repetitions.
    pub fn touched(&self) -> &[usize] {
        &self.touched
    }

    /// Returns the variable at worst-first rank `k` (1-based), breaking ties
    /// within a fitness bucket uniformly at random.
    pub fn select_by_rank<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> usize {
        assert!(
            (1..=self.len()).contains(&k),
            "rank {k} out of 1..={}",
            self.len()
        );
        let mut seen = 0;
        for bucket in &self.buckets {
            seen += bucket.len();
            if seen >= k {
                return bucket[rng.random_range(0..bucket.len())];
            }
        }
        unreachable!("bucket sizes sum to the variable count")
    }

    fn bucket_index(&self, key: i64) -> Option<usize> {
        usize::try_from(key - self.min_key).ok()
    }

    fn insert(&mut self, i: usize, key: i64) {
        if key < self.min_key {
            let grow = (self.min_key - key) as usize;
            self.buckets.splice(0..0, std::iter::repeat_with(Vec::new).take(grow));
            self.min_key = key;
        }
        let b = (key - self.min_key) as usize;
        if b >= self.buckets.len() {
            self.buckets.resize_with(b + 1, Vec::new);
        }
        self.slot[i] = self.buckets[b].len();
        self.buckets[b].push(i);
    }

    fn remove(&mut self, i: usize) {
        let b = (self.key_of[i] - self.min_key) as usize;
        let pos = self.slot[i];
        let bucket = &mut self.buckets[b];
        bucket.swap_remove(pos);
        if let Some(&moved) = bucket.get(pos) {
            self.slot[moved] = pos;
        }
    }
}

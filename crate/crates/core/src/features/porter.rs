//! The Porter suffix-stripping stemmer, original published rule set.
//!
//! Input is expected to be lower-case ASCII; anything else is returned
//! unchanged.

pub fn stem(word: &str) -> String {
    if word.is_empty() || !word.bytes().all(|b| b.is_ascii_lowercase()) {
        return word.to_string();
    }
    let mut w = Word(word.as_bytes().to_vec());
    w.step1a();
    w.step1b();
    w.step1c();
    w.step2();
    w.step3();
    w.step4();
    w.step5a();
    w.step5b();
    String::from_utf8(w.0).expect("ascii in, ascii out")
}

struct Word(Vec<u8>);

type Cond = fn(&Word, usize) -> bool;

impl Word {
    fn consonant(&self, i: usize) -> bool {
        match self.0[i] {
            b'a' | b'e' | b'i' | b'o' | b'u' => false,
            b'y' => i == 0 || !self.consonant(i - 1),
            _ => true,
        }
    }

    /// Number of VC sequences in the first `len` bytes.
    fn measure(&self, len: usize) -> usize {
        let mut m = 0;
        let mut i = 0;
        while i < len && self.consonant(i) {
            i += 1;
        }
        loop {
            while i < len && !self.consonant(i) {
                i += 1;
            }
            if i >= len {
                return m;
            }
            while i < len && self.consonant(i) {
                i += 1;
            }
            m += 1;
        }
    }

    fn has_vowel(&self, len: usize) -> bool {
        (0..len).any(|i| !self.consonant(i))
    }

    fn double_consonant(&self, len: usize) -> bool {
        len >= 2 && self.0[len - 1] == self.0[len - 2] && self.consonant(len - 1)
    }

    /// consonant-vowel-consonant ending, last consonant not w, x or y.
    fn cvc(&self, len: usize) -> bool {
        len >= 3
            && self.consonant(len - 3)
            && !self.consonant(len - 2)
            && self.consonant(len - 1)
            && !matches!(self.0[len - 1], b'w' | b'x' | b'y')
    }

    fn ends(&self, suffix: &str) -> bool {
        self.0.ends_with(suffix.as_bytes())
    }

    fn stem_len(&self, suffix: &str) -> usize {
        self.0.len() - suffix.len()
    }

    fn replace(&mut self, suffix: &str, with: &str) {
        let keep = self.stem_len(suffix);
        self.0.truncate(keep);
        self.0.extend_from_slice(with.as_bytes());
    }

    /// Apply the first rule whose suffix matches, if its condition holds.
    fn apply_first(&mut self, rules: &[(&str, &str)], cond: Cond) -> bool {
        for (suffix, with) in rules {
            if self.ends(suffix) {
                if cond(self, self.stem_len(suffix)) {
                    self.replace(suffix, with);
                    return true;
                }
                return false;
            }
        }
        false
    }

    fn step1a(&mut self) {
        self.apply_first(
            &[("sses", "ss"), ("ies", "i"), ("ss", "ss"), ("s", "")],
            |_, _| true,
        );
    }

    fn step1b(&mut self) {
        if self.ends("eed") {
            if self.measure(self.stem_len("eed")) > 0 {
                self.replace("eed", "ee");
            }
            return;
        }
        let stripped = ["ed", "ing"]
            .iter()
            .find(|s| self.ends(s) && self.has_vowel(self.stem_len(s)))
            .copied();
        let Some(suffix) = stripped else {
            return;
        };
        self.replace(suffix, "");
        if self.ends("at") || self.ends("bl") || self.ends("iz") {
            self.0.push(b'e');
        } else if self.double_consonant(self.0.len())
            && !matches!(self.0[self.0.len() - 1], b'l' | b's' | b'z')
        {
            self.0.pop();
        } else if self.measure(self.0.len()) == 1 && self.cvc(self.0.len()) {
            self.0.push(b'e');
        }
    }

    fn step1c(&mut self) {
        if self.ends("y") && self.has_vowel(self.stem_len("y")) {
            self.replace("y", "i");
        }
    }

    fn step2(&mut self) {
        self.apply_first(
            &[
                ("ational", "ate"),
                ("tional", "tion"),
                ("enci", "ence"),
                ("anci", "ance"),
                ("izer", "ize"),
                ("abli", "able"),
                ("alli", "al"),
                ("entli", "ent"),
                ("eli", "e"),
                ("ousli", "ous"),
                ("ization", "ize"),
                ("ation", "ate"),
                ("ator", "ate"),
                ("alism", "al"),
                ("iveness", "ive"),
                ("fulness", "ful"),
                ("ousness", "ous"),
                ("aliti", "al"),
                ("iviti", "ive"),
                ("biliti", "ble"),
            ],
            |w, len| w.measure(len) > 0,
        );
    }

    fn step3(&mut self) {
        self.apply_first(
            &[
                ("icate", "ic"),
                ("ative", ""),
                ("alize", "al"),
                ("iciti", "ic"),
                ("ical", "ic"),
                ("ful", ""),
                ("ness", ""),
            ],
            |w, len| w.measure(len) > 0,
        );
    }

    fn step4(&mut self) {
        const SUFFIXES: &[&str] = &[
            "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement", "ment", "ent",
            "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize",
        ];
        let Some(suffix) = SUFFIXES.iter().find(|s| self.ends(s)) else {
            return;
        };
        let len = self.stem_len(suffix);
        let ok = self.measure(len) > 1
            && (*suffix != "ion" || (len > 0 && matches!(self.0[len - 1], b's' | b't')));
        if ok {
            self.0.truncate(len);
        }
    }

    fn step5a(&mut self) {
        if !self.ends("e") {
            return;
        }
        let len = self.stem_len("e");
        let m = self.measure(len);
        if m > 1 || (m == 1 && !self.cvc(len)) {
            self.0.truncate(len);
        }
    }

    fn step5b(&mut self) {
        let len = self.0.len();
        if self.measure(len) > 1 && self.double_consonant(len) && self.0[len - 1] == b'l' {
            self.0.pop();
        }
    }
}

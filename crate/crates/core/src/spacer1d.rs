//! The one-dimensional spacer transform: letters of a base shift are
//! pulled apart by runs of `0` of length 2, 3 or 4.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::error::{bail, Result};
use crate::shift1d::{Presentation, Sft1D};
use crate::words::Word;

/// The spacer letter. Base alphabets must not contain it.
pub const SPACER: u8 = b'0';

const GAPS: [usize; 3] = [2, 3, 4];

/// Zero-run lengths between consecutive base letters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GapPattern(Vec<usize>);

impl GapPattern {
    pub fn new(gaps: Vec<usize>) -> Result<Self> {
        if let Some(g) = gaps.iter().find(|g| !GAPS.contains(g)) {
            bail!(Input, "gap {g} is not 2, 3 or 4");
        }
        Ok(GapPattern(gaps))
    }

    pub fn uniform(len: usize, gap: usize) -> Result<Self> {
        GapPattern::new(vec![gap; len])
    }

    pub fn gaps(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Every pattern of the given length, in lexicographic order.
    pub fn all(len: usize) -> impl Iterator<Item = GapPattern> {
        let total = 3usize.pow(len as u32);
        (0..total).map(move |mut code| {
            let mut gaps = vec![0; len];
            for g in gaps.iter_mut().rev() {
                *g = GAPS[code % 3];
                code /= 3;
            }
            GapPattern(gaps)
        })
    }
}

impl fmt::Display for GapPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

fn check_alphabet(alphabet: &[u8]) -> Result<()> {
    if alphabet.contains(&SPACER) {
        bail!(Alphabet, "the base alphabet already uses the spacer letter '0'");
    }
    Ok(())
}

/// Forbidden list of the image: `00000`, every `ab` and `a0b`, and every
/// forbidden word spread out with gaps in `{2,3,4}`.
pub fn f_forbidden_list(alphabet: &[u8], forbidden: &[Word]) -> Result<Vec<Word>> {
    check_alphabet(alphabet)?;
    let mut out = vec![Word::new(vec![SPACER; 5])];
    for &a in alphabet {
        for &b in alphabet {
            out.push(Word::new(vec![a, b]));
        }
    }
    for &a in alphabet {
        for &b in alphabet {
            out.push(Word::new(vec![a, SPACER, b]));
        }
    }
    let mut seen: HashSet<Word> = out.iter().cloned().collect();
    for w in forbidden {
        if w.letters().contains(&SPACER) {
            bail!(Alphabet, "forbidden word '{}' uses the spacer letter", w.as_str());
        }
        for g in GapPattern::all(w.len().saturating_sub(1)) {
            let spread = induce_word(&w.shifted(0), &g)?;
            if seen.insert(spread.clone()) {
                out.push(spread);
            }
        }
    }
    Ok(out)
}

/// The image shift `X(F′)` as a shift of finite type.
pub fn spacer_sft(x: &Sft1D) -> Result<Sft1D> {
    let mut alphabet = x.alphabet().to_vec();
    let forbidden = f_forbidden_list(&alphabet, x.forbidden())?;
    alphabet.push(SPACER);
    Sft1D::new(&alphabet, forbidden)
}

/// Type of the image of a base shift of type `t`.
pub fn image_type(t: usize) -> usize {
    5usize.max(5 * t - 4)
}

pub fn induce_word(v: &Word, g: &GapPattern) -> Result<Word> {
    if v.is_empty() {
        bail!(Input, "cannot induce from the empty word");
    }
    if g.len() + 1 != v.len() {
        bail!(Input, "{} gaps for a word of length {}", g.len(), v.len());
    }
    if v.letters().contains(&SPACER) {
        bail!(Alphabet, "'{}' uses the spacer letter", v.as_str());
    }
    let mut out = vec![v.letters()[0]];
    for (&c, &gap) in v.letters()[1..].iter().zip(g.gaps()) {
        out.extend(std::iter::repeat_n(SPACER, gap));
        out.push(c);
    }
    Ok(Word::at(v.offset(), out))
}

/// Drops the spacers after checking the runs between letters.
pub fn project_word(w: &Word) -> Result<Word> {
    let letters = w.letters();
    let positions: Vec<usize> = (0..letters.len()).filter(|&i| letters[i] != SPACER).collect();
    let mut run_start = 0;
    for &p in &positions {
        let run = p - run_start;
        let interior = run_start > 0;
        if interior && !GAPS.contains(&run) || !interior && run > 4 {
            bail!(Legality, "zero run of length {run} before index {p} of '{}'", w.as_str());
        }
        run_start = p + 1;
    }
    if letters.len() - run_start > 4 {
        bail!(Legality, "trailing zero run too long in '{}'", w.as_str());
    }
    Ok(Word::new(positions.iter().map(|&p| letters[p]).collect::<Vec<_>>()))
}

/// The exchange pair built around `u`: `u′` spaces everything by three
/// zeros, while `u″` uses two zeros on the left and four on the right, so
/// `u` sits `k` places further left in `u″`.
pub fn gap_shift_pair(u: &Word, p: &Word, s: &Word, k: usize) -> Result<(Word, Word)> {
    if p.len() != k || s.len() != k {
        bail!(Input, "|p| = {}, |s| = {}, expected {k}", p.len(), s.len());
    }
    if p.letters().contains(&SPACER) || s.letters().contains(&SPACER) {
        bail!(Input, "p and s must be base words");
    }
    let (Some(&first), Some(&last)) = (u.letters().first(), u.letters().last()) else {
        bail!(Input, "u is empty");
    };
    if first == SPACER || last == SPACER {
        bail!(Input, "u must begin and end with base letters");
    }
    let build = |lgap: usize, rgap: usize| {
        let mut out = Vec::new();
        for &c in p.letters() {
            out.push(c);
            out.extend(std::iter::repeat_n(SPACER, lgap));
        }
        out.extend_from_slice(u.letters());
        for &c in s.letters() {
            out.extend(std::iter::repeat_n(SPACER, rgap));
            out.push(c);
        }
        Word::new(out)
    };
    Ok((build(3, 3), build(2, 4)))
}

/// Length-`l` windows starting at the induced first letter of `v·e`, over
/// right extensions `e` accepted by `accept` and all gap patterns.
fn anchored_windows(
    v: &Word,
    letters: &[u8],
    l: usize,
    accept: &dyn Fn(&[u8]) -> bool,
) -> Result<BTreeSet<Vec<u8>>> {
    let need = (l + 2).div_ceil(3).max(v.len());
    let extra = need - v.len();
    let mut out = BTreeSet::new();
    let mut ext = vec![0usize; extra];
    loop {
        let mut base = v.letters().to_vec();
        base.extend(ext.iter().map(|&i| letters[i]));
        if accept(&base) {
            for g in GapPattern::all(base.len() - 1) {
                let w = induce_word(&Word::new(base.clone()), &g)?;
                let mut win = w.into_letters();
                win.truncate(l);
                out.insert(win);
            }
        }
        // odometer over extensions
        let mut i = extra;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            ext[i] += 1;
            if ext[i] < letters.len() {
                break;
            }
            ext[i] = 0;
        }
    }
}

/// Whether no length-`l` window anchored at `v` also arises anchored at
/// `v′`, extensions ranging over the full shift on their letters.
pub fn orbit_disjointness_check(v: &Word, v2: &Word, l: usize) -> Result<bool> {
    let letters: Vec<u8> = v.letters().iter().chain(v2.letters()).copied().collect::<BTreeSet<_>>().into_iter().collect();
    check_alphabet(&letters)?;
    let a = anchored_windows(v, &letters, l, &|_| true)?;
    let b = anchored_windows(v2, &letters, l, &|_| true)?;
    Ok(a.is_disjoint(&b))
}

/// As [`orbit_disjointness_check`], with extensions restricted to words
/// of the base shift `x`.
pub fn orbit_disjointness_check_in(x: &Sft1D, v: &Word, v2: &Word, l: usize) -> Result<bool> {
    check_alphabet(x.alphabet())?;
    let g = x.transfer_graph();
    let accept = |w: &[u8]| g.accepts(w);
    let a = anchored_windows(v, x.alphabet(), l, &accept)?;
    let b = anchored_windows(v2, x.alphabet(), l, &accept)?;
    Ok(a.is_disjoint(&b))
}

/// Presentation of the image from a presentation of the base: states pair
/// a base vertex with the length (0 to 4) of the current zero run.
pub fn spacer_image(base: &Presentation) -> Result<Presentation> {
    check_alphabet(base.alphabet())?;
    let n = base.vertex_count();
    let id = |v: usize, z: usize| v * 5 + z;
    let mut edges = Vec::new();
    for v in 0..n {
        for z in 0..4 {
            edges.push((id(v, z), SPACER, id(v, z + 1)));
        }
    }
    for (v, c, to) in base.edges() {
        for z in GAPS {
            edges.push((id(v, z), c, id(to, 0)));
        }
    }
    let names = (0..n)
        .flat_map(|v| (0..5).map(move |z| (v, z)))
        .map(|(v, z)| format!("{}|{z}", base.name(v)))
        .collect();
    let mut alphabet = vec![SPACER];
    alphabet.extend_from_slice(base.alphabet());
    Ok(Presentation::new(alphabet, names, &edges))
}

/// Length-`l` windows of inducements of base words, computed directly:
/// every word of `L_m(X)` with `m` letters enough to cover any window, all
/// gap patterns, and every alignment of the frame.
pub fn inducement_windows(x: &Sft1D, l: usize) -> Result<BTreeSet<Vec<u8>>> {
    check_alphabet(x.alphabet())?;
    let m = (l.max(1) - 1) / 3 + 3;
    let mut out = BTreeSet::new();
    for v in x.language(m) {
        for g in GapPattern::all(m - 1) {
            let w = induce_word(&v, &g)?;
            for win in w.letters().windows(l) {
                out.insert(win.to_vec());
            }
        }
    }
    Ok(out)
}

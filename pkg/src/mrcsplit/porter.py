"""Porter stemmer, original 1980 rule set.

Implemented from the published algorithm rather than a library so stem
output is pinned: later revisions of the algorithm (and popular library
modes) change a handful of rules, which would silently shift overlap
counts. Operates on lowercase tokens; characters outside a-z (digits,
hyphens, apostrophes) are treated as consonants, so tokens like "e-mails"
still lose a plural "s".
"""

import functools

_VOWELS = "aeiou"

_STEP2_SUFFIXES = (
    ("ational", "ate"), ("tional", "tion"), ("enci", "ence"), ("anci", "ance"),
    ("izer", "ize"), ("abli", "able"), ("alli", "al"), ("entli", "ent"),
    ("eli", "e"), ("ousli", "ous"), ("ization", "ize"), ("ation", "ate"),
    ("ator", "ate"), ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
    ("ousness", "ous"), ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble"),
)

_STEP3_SUFFIXES = (
    ("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
    ("ical", "ic"), ("ful", ""), ("ness", ""),
)

_STEP4_SUFFIXES = (
    "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
    "ment", "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize",
)


def _is_cons(word, i):
    ch = word[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        return i == 0 or not _is_cons(word, i - 1)
    return True


def _measure(stem):
    """Count of vowel-consonant sequences: the m in [C](VC)^m[V]."""
    m = 0
    prev_vowel = False
    for i in range(len(stem)):
        cons = _is_cons(stem, i)
        if cons and prev_vowel:
            m += 1
        prev_vowel = not cons
    return m


def _has_vowel(stem):
    return any(not _is_cons(stem, i) for i in range(len(stem)))


def _ends_double_cons(word):
    return (
        len(word) >= 2
        and word[-1] == word[-2]
        and _is_cons(word, len(word) - 1)
    )


def _ends_cvc(word):
    # consonant-vowel-consonant where the final consonant is not w, x or y
    if len(word) < 3:
        return False
    return (
        _is_cons(word, len(word) - 3)
        and not _is_cons(word, len(word) - 2)
        and _is_cons(word, len(word) - 1)
        and word[-1] not in "wxy"
    )


def _step1a(word):
    if word.endswith("sses"):
        return word[:-2]
    if word.endswith("ies"):
        return word[:-3] + "i"
    if word.endswith("ss"):
        return word
    if word.endswith("s"):
        return word[:-1]
    return word


def _step1b(word):
    if word.endswith("eed"):
        if _measure(word[:-3]) > 0:
            return word[:-1]
        return word
    removed = False
    if word.endswith("ed") and _has_vowel(word[:-2]):
        word = word[:-2]
        removed = True
    elif word.endswith("ing") and _has_vowel(word[:-3]):
        word = word[:-3]
        removed = True
    if removed:
        if word.endswith(("at", "bl", "iz")):
            word += "e"
        elif _ends_double_cons(word) and word[-1] not in "lsz":
            word = word[:-1]
        elif _measure(word) == 1 and _ends_cvc(word):
            word += "e"
    return word


def _step1c(word):
    if word.endswith("y") and _has_vowel(word[:-1]):
        return word[:-1] + "i"
    return word


def _longest_rule(word, suffixes):
    """Longest matching suffix in the step's list, or None.

    Porter's steps consider only the longest matching suffix; if its
    condition fails no shorter suffix is tried.
    """
    best = None
    for entry in suffixes:
        suffix = entry[0] if isinstance(entry, tuple) else entry
        if word.endswith(suffix) and (best is None or len(suffix) > _rule_len(best)):
            best = entry
    return best


def _rule_len(entry):
    return len(entry[0] if isinstance(entry, tuple) else entry)


def _step2(word):
    rule = _longest_rule(word, _STEP2_SUFFIXES)
    if rule is not None:
        suffix, replacement = rule
        stem = word[: -len(suffix)]
        if _measure(stem) > 0:
            return stem + replacement
    return word


def _step3(word):
    rule = _longest_rule(word, _STEP3_SUFFIXES)
    if rule is not None:
        suffix, replacement = rule
        stem = word[: -len(suffix)]
        if _measure(stem) > 0:
            return stem + replacement
    return word


def _step4(word):
    suffix = _longest_rule(word, _STEP4_SUFFIXES)
    if suffix is not None:
        stem = word[: -len(suffix)]
        if _measure(stem) > 1:
            if suffix == "ion" and not stem.endswith(("s", "t")):
                return word
            return stem
    return word


def _step5a(word):
    if word.endswith("e"):
        stem = word[:-1]
        m = _measure(stem)
        if m > 1 or (m == 1 and not _ends_cvc(stem)):
            return stem
    return word


def _step5b(word):
    if _measure(word) > 1 and _ends_double_cons(word) and word.endswith("l"):
        return word[:-1]
    return word


@functools.lru_cache(maxsize=262144)
def stem(word: str) -> str:
    """Stem one lowercase token. Tokens of length <= 2 pass through."""
    if len(word) <= 2:
        return word
    for step in (_step1a, _step1b, _step1c, _step2, _step3, _step4, _step5a, _step5b):
        word = step(word)
    return word

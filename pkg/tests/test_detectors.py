import math
import random

import pytest

from dictanomaly.corpus import FieldInstance, TiedPair
from dictanomaly.detectors import (
    DETECTOR_IDS,
    DetectorConfig,
    DetectorError,
    detect_char_sequence,
    detect_length_ratio,
    detect_text_length,
    detect_transliteration,
    detect_uncommon_chars,
    detect_word_sequence,
)
from dictanomaly.synthetic import generate_dictionary
from oracles import mean_sd_oracle


def field(values, tag="F"):
    return [FieldInstance(tag, v, i, 0) for i, v in enumerate(values)]


def pairs(items, first="ORTH", second="PRON"):
    return [
        TiedPair(FieldInstance(first, a, i, 0), FieldInstance(second, b, i, 0))
        for i, (a, b) in enumerate(items)
    ]


def flagged(anomalies):
    return {a.entry_index for a in anomalies}


@pytest.fixture(scope="module")
def gender():
    # a large GENDER field so a one-off character clears log10(N) > 4
    vals = ["M." if i % 2 else "F." for i in range(12000)]
    vals[4321] = "/F."
    return field(vals, "GENDER")


@pytest.fixture(scope="module")
def number():
    vals = ["PL." if i % 2 else "SING." for i in range(12000)]
    vals[777] = "PLU."
    return field(vals, "NUMBER")


# Uncommon characters


def test_gender_slash_is_uncommon(gender):
    found = detect_uncommon_chars(gender)
    assert flagged(found) == {4321}
    assert "'/'" in found[0].explanation
    assert found[0].score == pytest.approx(math.log10(12000), abs=1e-12)


def test_one_in_twenty_thousand():
    vals = ["ab"] * 20000
    vals[5] = "a/b"
    (a,) = detect_uncommon_chars(field(vals))
    assert a.entry_index == 5
    assert a.score == pytest.approx(math.log10(20000), abs=1e-12)
    assert a.score == pytest.approx(4.301030, abs=1e-6)


def test_identical_texts_have_no_uncommon_chars():
    assert detect_uncommon_chars(field(["abc"] * 50)) == []


def test_uncommon_score_is_max_idf():
    vals = ["a"] * 9998 + ["ab", "abc"]
    vals[0] = "xa"
    cfg = DetectorConfig(idf_threshold=3.8)
    found = {a.entry_index: a for a in detect_uncommon_chars(field(vals), cfg)}
    assert set(found) == {0, 9999}
    assert found[9999].score == pytest.approx(4.0)
    assert "'c'" in found[9999].explanation and "'b'" not in found[9999].explanation


def test_empty_input():
    for det in (detect_uncommon_chars, detect_text_length, detect_word_sequence, detect_char_sequence):
        assert det([]) == []
    assert detect_length_ratio([]) == []
    assert detect_transliteration([]) == []


# Text length


def test_long_outlier_z():
    vals = ["abcde"] * 1000 + ["x" * 50]
    (a,) = detect_text_length(field(vals))
    mu, sd = mean_sd_oracle([5] * 1000 + [50])
    assert sd == pytest.approx(1.42, abs=0.01)
    assert a.score == pytest.approx((50 - mu) / sd, abs=1e-9)
    assert a.score == pytest.approx(31.6, abs=0.05)
    assert a.entry_index == 1000


def test_constant_length_no_flags():
    assert detect_text_length(field(["ab", "cd", "ef"] * 10)) == []


def test_plu_length_is_not_unusual(number):
    assert 777 not in flagged(detect_text_length(number))


def test_short_values_flagged_two_sided():
    vals = ["x" * 20] * 400 + ["x"]
    (a,) = detect_text_length(field(vals))
    assert "short" in a.explanation and a.score > 4


def test_length_shift_invariance():
    rng = random.Random(1)
    vals = ["a" * rng.choice([3, 4, 5, 5, 6]) for _ in range(300)] + ["a" * 30, "a"]
    base = flagged(detect_text_length(field(vals)))
    shifted = flagged(detect_text_length(field(["zz" + v for v in vals])))
    assert base == shifted and base


# Word sequence


def test_gender_slash_word_entropy(gender):
    assert 4321 in flagged(detect_word_sequence(gender))


def test_repeated_text_no_word_flags():
    assert detect_word_sequence(field(["the cat sat"] * 100)) == []


def test_nonsense_words_flagged():
    vals = ["the cat sat"] * 500 + ["zqx qzx xqz"]
    assert flagged(detect_word_sequence(field(vals))) == {500}


def test_word_entropy_is_one_sided():
    # 200 copies of one text sit far below the mean entropy; never flagged
    rng = random.Random(0)
    words = "ab cd ef gh ij kl mn op".split()
    vals = [" ".join(rng.choice(words) for _ in range(3)) for _ in range(300)] + ["ab ab ab"] * 200
    found = detect_word_sequence(field(vals), DetectorConfig(word_entropy_z_threshold=0.5))
    assert found
    assert not flagged(found) & set(range(300, 500))
    assert all(a.score > 0.5 for a in found)


# Character sequence


def test_plu_flagged_by_char_model(number):
    assert 777 in flagged(detect_char_sequence(number))
    assert 777 in flagged(detect_uncommon_chars(number))


def test_reordered_common_chars():
    vals = ["PL."] * 500 + [".LP"]
    f = field(vals)
    assert flagged(detect_char_sequence(f)) == {500}
    assert detect_uncommon_chars(f) == []


def test_single_text_no_char_flags():
    assert detect_char_sequence(field(["abc"])) == []


def test_rare_char_without_char_sequence_flag():
    # uncommon-chars sees something the character model does not
    synth = generate_dictionary(12000, 0.0, seed=4)
    vals = [e.orth for e in synth.entries]
    vals[10] = vals[10][:-1] + "ß"
    f = field(vals)
    assert 10 in flagged(detect_uncommon_chars(f))
    assert 10 not in flagged(detect_char_sequence(f))


# Length ratio


RATIO_EXAMPLES = [
    ("t", "tē", 0.50),
    ("ease", "ēz", 2.00),
    ("v", "vē", 0.50),
    ("groundwork", 'ground"wûrk`', 0.83),
    ("lithargyrum", 'lĭ*thär"jĭ*rŭm', 0.79),
    ("haidingerite", 'hī"dĭng*ẽr*īt', 0.92),
]


@pytest.mark.parametrize("orth,pron,ratio", RATIO_EXAMPLES)
def test_reference_ratios(orth, pron, ratio):
    assert round(len(orth) / len(pron), 2) == ratio


def test_identical_ratios_no_flags():
    assert detect_length_ratio(pairs([("ab", "cd"), ("abc", "def"), ("a", "b")])) == []


def test_empty_second_field_sentinel():
    found = detect_length_ratio(pairs([("ab", "ab")] * 5 + [("ab", "")]))
    (a,) = found
    assert a.score == math.inf and a.explanation == "empty second field"
    assert a.observed_values == ("ab", "")


def test_ratio_partitions():
    # short words naturally run longer in pronunciation than long ones
    short = [("ab", "abcd")] * 30 + [("ab", "ab")]
    long_ = [("abcdefgh", "abcdefgh")] * 30 + [("abcdefgh", "abcd")]
    p = pairs(short + long_)
    plain = flagged(detect_length_ratio(p))
    parted = detect_length_ratio(p, DetectorConfig(ratio_partition=(4,)))
    assert flagged(parted) == {30, 61}
    assert all("partition" in a.explanation for a in parted)
    assert plain != flagged(parted)


URDU = {
    "ا": "ā", "ب": "b", "پ": "p", "ت": "t", "ج": "j", "چ": "ch", "د": "d", "ر": "r",
    "ز": "z", "س": "s", "ش": "sh", "ع": "'", "ف": "f", "ق": "q", "ک": "k", "گ": "g",
    "ل": "l", "م": "m", "ن": "n", "و": "o", "ہ": "h", "ی": "ī", " ": " ",
}


@pytest.fixture(scope="module")
def urdu_pairs():
    rng = random.Random(11)
    letters = [c for c in URDU if c != " "]
    items = []
    for _ in range(600):
        words = [
            "".join(rng.choice(letters) for _ in range(rng.randint(2, 5)))
            for _ in range(rng.choice([1, 1, 1, 2]))
        ]
        orth = " ".join(words)
        items.append((orth, "".join(URDU[c] for c in orth)))
    items.append(("رجعت قہقری", "rā"))
    return pairs(items)


def test_urdu_example_ratio(urdu_pairs):
    found = {a.entry_index: a for a in detect_length_ratio(urdu_pairs)}
    assert 600 in found
    assert "unusually high" in found[600].explanation


def test_urdu_example_transliteration(urdu_pairs):
    found = {a.entry_index: a for a in detect_transliteration(urdu_pairs)}
    assert 600 in found
    assert max(found, key=lambda i: found[i].score) == 600


# Transliteration


def _identity_items(n, seed=0):
    rng = random.Random(seed)
    return [
        (w, w)
        for w in ("".join(rng.choice("abcdefgh") for _ in range(rng.randint(2, 7))) for _ in range(n))
    ]


def test_identity_corpus_no_flags():
    assert detect_transliteration(pairs(_identity_items(200))) == []


def test_identity_plus_corruption():
    items = _identity_items(200) + [("abcdef", "zzzzzz")]
    assert flagged(detect_transliteration(pairs(items))) == {200}


def test_lowercase_tied():
    items = [(w.upper(), w) for w, _ in _identity_items(150)]
    assert detect_transliteration(pairs(items), DetectorConfig(lowercase_tied=True)) == []


def test_untrainable_corpus_raises_detector_error():
    with pytest.raises(DetectorError):
        detect_transliteration(pairs([("", "x"), ("", "y")]))


def test_reuses_supplied_model():
    from dictanomaly.translit import train_translit

    items = _identity_items(100) + [("abcdef", "zzzzzz")]
    model = train_translit(items)
    a = detect_transliteration(pairs(items), model=model)
    assert a == detect_transliteration(pairs(items))


# Cross-cutting properties


@pytest.fixture(scope="module")
def synth_fields():
    s = generate_dictionary(1500, 0.05, seed=3)
    orth = field([e.orth for e in s.entries], "orth")
    pos = field([e.pos for e in s.entries], "pos")
    tied = pairs([(e.orth, e.pron) for e in s.entries], "orth", "pron")
    return orth, pos, tied


RUNNERS = {
    "uncommon_chars": (detect_uncommon_chars, "idf_threshold", 0),
    "text_length": (detect_text_length, "length_z_threshold", 1),
    "word_sequence": (detect_word_sequence, "word_entropy_z_threshold", 1),
    "char_sequence": (detect_char_sequence, "char_entropy_z_threshold", 0),
    "length_ratio": (detect_length_ratio, "ratio_z_threshold", 2),
}


@pytest.mark.parametrize("det", sorted(RUNNERS))
def test_threshold_monotone_and_score_contract(synth_fields, det):
    fn, knob, which = RUNNERS[det]
    data = synth_fields[which]
    prev = None
    for t in (0.5, 1, 1.5, 2, 3, 4, 6):
        found = fn(data, DetectorConfig(**{knob: t}))
        for a in found:
            assert a.detector_id == det
            assert a.score >= a.threshold == t
            assert a.explanation
        ids = {a.locator for a in found}
        if prev is not None:
            assert ids <= prev
        prev = ids


def test_locators_resolve(synth_fields):
    orth, _, tied = synth_fields
    by_loc = {(i.entry_index, i.occurrence_index): i for i in orth}
    for a in detect_char_sequence(orth, DetectorConfig(char_entropy_z_threshold=1.5)):
        assert by_loc[(a.entry_index, a.occurrence_index)].text_value == a.observed_values[0]
    pair_map = {(p.first.entry_index, p.first.occurrence_index): p for p in tied}
    for a in detect_length_ratio(tied):
        p = pair_map[(a.entry_index, a.occurrence_index)]
        assert a.observed_values == (p.first.text_value, p.second.text_value)
        assert a.field_names == ("orth", "pron")


def test_detector_ids():
    assert set(DETECTOR_IDS) == {
        "uncommon_chars", "text_length", "word_sequence",
        "char_sequence", "length_ratio", "transliteration",
    }


def test_config_defaults_and_validation():
    cfg = DetectorConfig()
    assert (cfg.idf_threshold, cfg.length_z_threshold) == (4, 4)
    assert (cfg.word_lm_order, cfg.word_entropy_z_threshold) == (4, 5)
    assert (cfg.char_lm_order, cfg.char_entropy_z_threshold) == (4, 5)
    assert (cfg.ratio_z_threshold, cfg.translit_z_threshold) == (2, 2)
    assert cfg.ratio_partition is None and cfg.lowercase_tied is False
    with pytest.raises(ValueError):
        DetectorConfig(idf_threshold=0)
    with pytest.raises(ValueError):
        DetectorConfig(char_lm_order=0)
    with pytest.raises(ValueError):
        DetectorConfig(ratio_partition=(5, 3))
    with pytest.raises(ValueError):
        DetectorConfig(lm_delta=0)

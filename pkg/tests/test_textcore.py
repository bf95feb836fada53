"""Kernel tests: canonicalization, encoding, tokenization, edit distance."""
from __future__ import annotations

import random
import string

import pytest

from cryptext.errors import ConfigError, EmptyTokenError
from cryptext.textcore import (
    EncoderConfig,
    canonicalize,
    config_hash,
    default_config,
    encode,
    fnv1a64,
    levenshtein,
    load_encoder_config,
    replace_spans,
    tokenize,
    within_distance,
)


def dp_distance(a: str, b: str) -> int:
    """Reference full-matrix edit distance, kept independent of the package."""
    rows, cols = len(a) + 1, len(b) + 1
    table = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        table[i][0] = i
    for j in range(cols):
        table[0][j] = j
    for i in range(1, rows):
        for j in range(1, cols):
            table[i][j] = min(
                table[i - 1][j] + 1,
                table[i][j - 1] + 1,
                table[i - 1][j - 1] + (a[i - 1] != b[j - 1]),
            )
    return table[-1][-1]


# ---------------------------------------------------------------- encoding


@pytest.mark.parametrize(
    "token,k,expected",
    [
        ("the", 1, "TH000"),
        ("thee", 1, "TH000"),
        ("dirty", 1, "DI630"),
        ("dirrty", 1, "DI630"),
        ("dirrrty", 1, "DI630"),
        ("lesbian", 0, "L215"),
        ("losbian", 0, "L215"),
    ],
)
def test_encode_known_keys(token, k, expected):
    assert encode(token, k).text == expected


def test_encode_level_one_separates_by_second_letter():
    a = encode("lesbian", 1)
    b = encode("losbian", 1)
    assert a.text != b.text
    assert a.text[:2] == "LE" and b.text[:2] == "LO"
    assert a.text[2:] == b.text[2:]  # same digit suffix


@pytest.mark.parametrize("k", [0, 1, 2])
def test_encode_character_repetition_collapses(k):
    assert encode("porn", k) == encode("porrrrn", k)
    assert encode("the", k) == encode("thee", k)
    assert encode("dirty", k) == encode("ddirty", k)  # repeat inside the literal prefix


def test_encode_repetition_property_randomized():
    rng = random.Random(1234)
    letters = string.ascii_lowercase
    for _ in range(300):
        word = "".join(rng.choice(letters) for _ in range(rng.randint(1, 9)))
        pos = rng.randrange(len(word))
        repeats = rng.randint(2, 5)
        noisy = word[:pos] + word[pos] * repeats + word[pos + 1 :]
        for k in (0, 1, 2):
            assert encode(noisy, k) == encode(word, k), (word, noisy, k)


def test_encode_prefix_law():
    rng = random.Random(99)
    for _ in range(200):
        word = "".join(rng.choice(string.ascii_lowercase) for _ in range(rng.randint(1, 8)))
        for k in (0, 1, 2, 3):
            canon = canonicalize(word)
            collapsed = []
            for ch in canon:
                if not collapsed or collapsed[-1] != ch:
                    collapsed.append(ch)
            expected = "".join(collapsed)[: k + 1].upper().ljust(k + 1, "0")
            assert encode(word, k).text[: k + 1] == expected


def test_encode_pads_but_never_truncates():
    assert encode("a", 1).text == "A0000"
    long_key = encode("republicans", 1).text
    assert len(long_key) > 5  # more than three digit codes survive
    assert long_key.startswith("RE")


def test_encode_determinism():
    assert encode("DemoKrats", 2) == encode("DemoKrats", 2)


def test_encode_rejects_letterless_tokens():
    with pytest.raises(EmptyTokenError):
        encode("29", 0)  # digits that map to no letter
    with pytest.raises(EmptyTokenError):
        encode("", 1)


def test_encode_rejects_negative_level():
    with pytest.raises(ConfigError):
        encode("word", -1)


# ---------------------------------------------------------- canonicalize


@pytest.mark.parametrize(
    "raw,expected",
    [
        ("republic@@ns", "republicaans"),
        ("democrats", "democrats"),
        ("mus-lim", "muslim"),
        ("demokRATs", "demokrats"),
        ("suic1de", "suiclde"),
        ("r3publicans", "republicans"),
        ("don't", "dont"),
        ("répub", "repub"),
        ("naïve", "naive"),
        ("w0w", "wow"),
    ],
)
def test_canonicalize_examples(raw, expected):
    assert canonicalize(raw) == expected


def test_canonicalize_idempotent_randomized():
    rng = random.Random(7)
    pool = string.ascii_letters + string.digits + "@!$|+-'._ éüßñ"
    for _ in range(500):
        s = "".join(rng.choice(pool) for _ in range(rng.randint(0, 12)))
        once = canonicalize(s)
        assert canonicalize(once) == once, s


# -------------------------------------------------------------- tokenize


@pytest.mark.parametrize(
    "text,expected",
    [
        ("the dirrty republicans", ["the", "dirrty", "republicans"]),
        ("", []),
        ("Thinking about suic1de.", ["Thinking", "about", "suic1de"]),
        ("A fake tree burned and RepubLIEcans are calling for,",
         ["A", "fake", "tree", "burned", "and", "RepubLIEcans", "are", "calling", "for"]),
        ("mus-lim, chi-nese!", ["mus-lim", "chi-nese"]),
        ("... !!! ???", []),
        ("say 'ello, don't shout", ["say", "ello", "don't", "shout"]),
        ("republic@@ns rule", ["republic@@ns", "rule"]),
        ("@mention w0w!!!", ["mention", "w0w"]),
    ],
)
def test_tokenize_token_texts(text, expected):
    assert [s.raw for s in tokenize(text)] == expected


def test_tokenize_reconstruction_byte_for_byte():
    rng = random.Random(42)
    pool = string.ascii_letters + string.digits + " \t@!$'-.,;:\"éß日 \n"
    for _ in range(300):
        text = "".join(rng.choice(pool) for _ in range(rng.randint(0, 40)))
        data = text.encode("utf-8")
        rebuilt = bytearray()
        pos = 0
        for span in tokenize(text):
            assert span.start < span.end
            assert span.start >= pos
            rebuilt += data[pos : span.start]
            raw_bytes = span.raw.encode("utf-8")
            assert data[span.start : span.end] == raw_bytes
            rebuilt += raw_bytes
            pos = span.end
        rebuilt += data[pos:]
        assert bytes(rebuilt) == data


def test_tokenize_byte_offsets_with_multibyte_gap():
    text = "héllo wörld"
    spans = tokenize(text)
    assert [s.raw for s in spans] == ["héllo", "wörld"]
    data = text.encode("utf-8")
    for span in spans:
        assert data[span.start : span.end].decode("utf-8") == span.raw


def test_tokenize_word_flag():
    spans = tokenize("democrats 29 suic1de")
    assert [(s.raw, s.is_word) for s in spans] == [
        ("democrats", True),
        ("29", False),
        ("suic1de", True),
    ]


def test_replace_spans_touches_only_selected_bytes():
    text = "thee dirty repubLIEcans!"
    spans = tokenize(text)
    out = replace_spans(text, [(spans[0], "the"), (spans[2], "republicans")])
    assert out == "the dirty republicans!"


# -------------------------------------------------------- edit distance


@pytest.mark.parametrize(
    "a,b,expected",
    [
        ("abc", "abc", 0),
        ("democrats", "demokrats", 1),
        ("republicans", "republic@@ns", 2),
        ("", "abc", 3),
        ("kitten", "sitting", 3),
    ],
)
def test_levenshtein_examples(a, b, expected):
    assert levenshtein(a, b) == expected
    assert dp_distance(a, b) == expected


def test_levenshtein_metric_properties_randomized():
    rng = random.Random(2024)
    alphabet = "ab@1"
    strings = ["".join(rng.choice(alphabet) for _ in range(rng.randint(0, 8))) for _ in range(60)]
    for s in strings:
        assert levenshtein(s, s) == 0
    for _ in range(400):
        a, b, c = rng.choice(strings), rng.choice(strings), rng.choice(strings)
        dab = levenshtein(a, b)
        assert dab >= 0
        assert dab == levenshtein(b, a)
        assert dab <= levenshtein(a, c) + levenshtein(c, b)
        assert (dab == 0) == (a == b)


def all_strings(alphabet, max_len):
    out = [""]
    frontier = [""]
    for _ in range(max_len):
        frontier = [s + ch for s in frontier for ch in alphabet]
        out += frontier
    return out


def test_within_distance_matches_reference_exhaustively():
    universe = all_strings("ab@1", 3)
    for a in universe:
        for b in universe:
            for d in range(0, 4):
                assert within_distance(a, b, d) == (dp_distance(a, b) <= d), (a, b, d)


def test_within_distance_matches_reference_randomized():
    rng = random.Random(555)
    alphabet = "ab@1"
    for _ in range(3000):
        a = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 8)))
        b = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 8)))
        d = rng.randint(0, 8)
        assert within_distance(a, b, d) == (dp_distance(a, b) <= d), (a, b, d)


def test_within_distance_short_circuits_on_length_gap():
    assert within_distance("ab", "abcdefgh", 3) is False
    assert within_distance("same", "same", 0) is True
    assert within_distance("republicans", "repubLIEcans".casefold(), 1) is True
    assert within_distance("abc", "xyz", 1) is False


def test_within_distance_rejects_negative_bound():
    with pytest.raises(ConfigError):
        within_distance("a", "b", -1)


# ------------------------------------------------------- encoder config


def test_default_config_partitions_alphabet():
    cfg = default_config()
    letters = set(cfg.digit_groups) | cfg.skip_set
    assert letters == set(string.ascii_lowercase)
    assert not (set(cfg.digit_groups) & cfg.skip_set)


def test_visual_map_targets_are_not_sources():
    cfg = default_config()
    assert not (set(cfg.visual_map.values()) & set(cfg.visual_map))


def test_config_validation_rejects_bad_partitions():
    with pytest.raises(ConfigError):
        EncoderConfig(
            visual_map={},
            digit_groups={"b": "1"},
            skip_set=frozenset("aeiou"),
            strip_chars=frozenset("-"),
        )
    with pytest.raises(ConfigError):
        EncoderConfig(
            visual_map={"@": "A"},  # uppercase target
            digit_groups=default_config().digit_groups,
            skip_set=default_config().skip_set,
            strip_chars=frozenset(),
        )


def test_config_file_round_trip(tmp_path):
    path = tmp_path / "encoder.cfg"
    path.write_text(
        "# sample encoder rules\n"
        "[visual_map]\n"
        "@=a\n"
        "1=l\n"
        "0=o\n"
        "[digit_groups]\n"
        "bfpv=1\n"
        "cgjkqsxz=2\n"
        "dt=3\n"
        "l=4\n"
        "mn=5\n"
        "r=6\n"
        "[skip]\n"
        "aeiouhwy\n"
        "[strip]\n"
        "-'._\n",
        encoding="utf-8",
    )
    cfg = load_encoder_config(path)
    assert cfg.visual_map == {"@": "a", "1": "l", "0": "o"}
    assert cfg.digit_groups["s"] == "2"
    assert "h" in cfg.skip_set
    assert "-" in cfg.strip_chars
    assert encode("the", 1, cfg).text == "TH000"


def test_config_file_rejects_unknown_section(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("[mystery]\nx=y\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_encoder_config(path)


def test_config_hash_is_stable_and_sensitive():
    base = config_hash(default_config())
    assert base == config_hash(default_config())
    assert len(base) == 16
    custom = EncoderConfig(
        visual_map={},
        digit_groups=default_config().digit_groups,
        skip_set=default_config().skip_set,
        strip_chars=default_config().strip_chars,
    )
    assert config_hash(custom) != base


def test_fnv1a64_known_vectors():
    # Published FNV-1a 64-bit test vectors.
    assert fnv1a64(b"") == 0xCBF29CE484222325
    assert fnv1a64(b"a") == 0xAF63DC4C8601EC8C
    assert fnv1a64(b"foobar") == 0x85944171F73967E8

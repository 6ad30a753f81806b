"""Pure-Python feature-hashing embedder used to cross-check the C++ one."""

import math

MASK = (1 << 64) - 1
SIGN_SALT = 0x5BD1E9955BD1E995


def splitmix64(z):
    z = (z + 0x9E3779B97F4A7C15) & MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def stable_hash(data, seed):
    h = 0xCBF29CE484222325 ^ splitmix64(seed)
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & MASK
    return splitmix64(h)


def _is_word(cp):
    if cp < 0x80:
        return chr(cp).isascii() and chr(cp).isalnum()
    if cp <= 0xBF or cp in (0xD7, 0xF7):
        return False
    for lo, hi in ((0x2000, 0x2BFF), (0x3000, 0x303F), (0xFE30, 0xFE4F), (0xFF00, 0xFF0F), (0xFF1A, 0xFF20)):
        if lo <= cp <= hi:
            return False
    return not (cp == 0xFFFD or 0xD800 <= cp <= 0xDFFF)


def _lower(cp):
    if 0x41 <= cp <= 0x5A or (0xC0 <= cp <= 0xDE and cp != 0xD7):
        return cp + 32
    return cp


def tokenize(text):
    tokens, cur = [], []
    for ch in text:
        cp = ord(ch)
        if _is_word(cp):
            cur.append(chr(_lower(cp)))
        elif cur:
            tokens.append("".join(cur))
            cur = []
    if cur:
        tokens.append("".join(cur))
    return tokens


def hash_embed(text, dim=256, seed=0):
    acc = [0.0] * dim
    for tok in tokenize(text):
        data = tok.encode("utf-8")
        bucket = stable_hash(data, seed) % dim
        negative = (stable_hash(data, seed ^ SIGN_SALT) >> 63) != 0
        acc[bucket] += -1.0 if negative else 1.0
    norm = math.sqrt(sum(v * v for v in acc))
    return [v / norm for v in acc] if norm > 0 else acc

"""Reference signed feature hashing used to freeze golden vectors."""
import math
import re
import sys

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
SEP = b"\x1f"


def fnv1a64(data: bytes) -> int:
    h = FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def tokens(text: str, orders=(1, 2), lowercase=True):
    raw = text.encode("utf-8")
    words = re.findall(rb"[0-9A-Za-z\x80-\xff]+", raw)
    if lowercase:
        words = [w.lower() for w in words]
    out = []
    for n in sorted(orders):
        for i in range(len(words) - n + 1):
            out.append(SEP.join(words[i:i + n]))
    return out


def featurize(text: str, dim_log2=14, orders=(1, 2), lowercase=True):
    d = 1 << dim_log2
    v = [0.0] * d
    for t in tokens(text, orders, lowercase):
        h = fnv1a64(t)
        v[h % d] += -1.0 if (h >> 63) & 1 else 1.0
    norm = math.sqrt(sum(x * x for x in v))
    if norm > 0:
        v = [x / norm for x in v]
    return v


if __name__ == "__main__":
    vec = featurize("free prize click here", dim_log2=4, orders=(1,))
    print([repr(x) for x in vec])
    for t in tokens("free prize click here", (1,)):
        h = fnv1a64(t)
        print(t, hex(h), h % 16, (h >> 63) & 1)

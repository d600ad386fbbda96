#!/usr/bin/env python3
"""Generates the wire-format fixture corpus under fixtures/.

Frames are assembled field-by-field with stdlib struct packing, independent
of the C++ codecs that the fixtures test. Each fixture is a .hex file of
whitespace-separated octets plus a sibling .expect file of key=value lines.

Run from the repo root:  python3 scripts/gen_fixtures.py
"""

import os
import struct

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")


def write_fixture(subdir, name, frame, expect):
    d = os.path.join(ROOT, subdir)
    os.makedirs(d, exist_ok=True)
    hexpath = os.path.join(d, name + ".hex")
    with open(hexpath, "w") as f:
        octets = ["%02x" % b for b in frame]
        for i in range(0, len(octets), 16):
            f.write(" ".join(octets[i:i + 16]) + "\n")
    with open(os.path.join(d, name + ".expect"), "w") as f:
        for k, v in expect:
            f.write("%s=%s\n" % (k, v))
    print("wrote %s (%d bytes)" % (hexpath, len(frame)))


def hexstr(b):
    return " ".join("%02x" % x for x in b)


# ---------------------------------------------------------------- GTP-U ----

def gtpu_frame(msg_type, teid, payload, seq=None, npdu=None, exts=None,
               force_opt_block=False):
    """exts: list of (ext_type, content_bytes); content length must be 4n-2."""
    exts = exts or []
    e = 1 if exts else 0
    s = 1 if seq is not None else 0
    pn = 1 if npdu is not None else 0
    flags = (1 << 5) | (1 << 4) | (e << 2) | (s << 1) | pn  # version 1, PT=1
    body = b""
    if e or s or pn or force_opt_block:
        next_type = exts[0][0] if exts else 0
        body += struct.pack(">HBB", seq or 0, npdu or 0, next_type)
        for i, (et, content) in enumerate(exts):
            assert (len(content) + 2) % 4 == 0, "ext content must pad to 4n-2"
            units = (len(content) + 2) // 4
            nxt = exts[i + 1][0] if i + 1 < len(exts) else 0
            body += struct.pack(">B", units) + content + struct.pack(">B", nxt)
    body += payload
    return struct.pack(">BBHI", flags, msg_type, len(body), teid) + body


def gtpu_expect(msg_type, teid, payload, seq=None, npdu=None, exts=None,
                roundtrip="exact"):
    exts = exts or []
    kv = [("version", 1), ("pt", 1), ("e", 1 if exts else 0),
          ("s", 1 if seq is not None else 0), ("pn", 1 if npdu is not None else 0),
          ("msg_type", msg_type), ("teid", teid)]
    if seq is not None:
        kv.append(("seq", seq))
    if npdu is not None:
        kv.append(("npdu", npdu))
    kv.append(("ext_count", len(exts)))
    for i, (et, content) in enumerate(exts):
        kv.append(("ext%d_type" % i, et))
        kv.append(("ext%d_content" % i, hexstr(content)))
    kv.append(("payload", hexstr(payload)))
    kv.append(("roundtrip", roundtrip))
    return kv


def gen_gtpu():
    pay8 = bytes(range(0x10, 0x18))

    f = gtpu_frame(255, 42, pay8)
    assert f[:8] == bytes.fromhex("30ff00080000002a"), f[:8].hex()
    write_fixture("gtpu", "gpdu_minimal", f, gtpu_expect(255, 42, pay8))

    write_fixture("gtpu", "gpdu_empty", gtpu_frame(255, 0, b""),
                  gtpu_expect(255, 0, b""))

    write_fixture("gtpu", "gpdu_seq", gtpu_frame(255, 0x11223344, pay8, seq=7),
                  gtpu_expect(255, 0x11223344, pay8, seq=7))

    write_fixture("gtpu", "gpdu_npdu", gtpu_frame(255, 9, pay8, npdu=0xab),
                  gtpu_expect(255, 9, pay8, npdu=0xab))

    write_fixture("gtpu", "gpdu_seq_npdu",
                  gtpu_frame(255, 0xffffffff, pay8, seq=0xffff, npdu=1),
                  gtpu_expect(255, 0xffffffff, pay8, seq=0xffff, npdu=1))

    # PDU session container (type 0x85), 4-byte extension: 2 content bytes
    ext1 = [(0x85, bytes([0x00, 0x09]))]
    write_fixture("gtpu", "gpdu_ext_pdu_session",
                  gtpu_frame(255, 0x2a, pay8, exts=ext1),
                  gtpu_expect(255, 0x2a, pay8, exts=ext1))

    # two chained extensions, second 8 bytes long (6 content bytes)
    ext2 = [(0x85, bytes([0x10, 0x09])), (0xc0, bytes([1, 2, 3, 4, 5, 6]))]
    write_fixture("gtpu", "gpdu_ext_chain",
                  gtpu_frame(255, 7, pay8, seq=1, exts=ext2),
                  gtpu_expect(255, 7, pay8, seq=1, exts=ext2))

    write_fixture("gtpu", "echo_request", gtpu_frame(1, 0, b"", seq=5),
                  gtpu_expect(1, 0, b"", seq=5))

    write_fixture("gtpu", "end_marker", gtpu_frame(254, 0x600, b""),
                  gtpu_expect(254, 0x600, b""))

    big = bytes((i * 7) & 0xFF for i in range(600))
    write_fixture("gtpu", "gpdu_large", gtpu_frame(255, 0x100, big),
                  gtpu_expect(255, 0x100, big))


# ----------------------------------------------------------- IPv4 / UDP ----

def cksum(data):
    """RFC 1071 ones'-complement sum folded to 16 bits."""
    if len(data) % 2:
        data += b"\x00"
    total = 0
    for i in range(0, len(data), 2):
        total += (data[i] << 8) | data[i + 1]
        total = (total & 0xFFFF) + (total >> 16)
    return (~total) & 0xFFFF


def ip(a):
    parts = [int(x) for x in a.split(".")]
    return struct.pack(">BBBB", *parts)


def inner_frame(src, dst, ttl, sport, dport, payload, proto=17):
    udp_len = 8 + len(payload)
    total = 20 + udp_len
    hdr = struct.pack(">BBHHHBBH", 0x45, 0, total, 0, 0, ttl, proto, 0)
    hdr += ip(src) + ip(dst)
    hdr = hdr[:10] + struct.pack(">H", cksum(hdr)) + hdr[12:]
    assert cksum(hdr) == 0
    udp = struct.pack(">HHHH", sport, dport, udp_len, 0) + payload
    pseudo = ip(src) + ip(dst) + struct.pack(">BBH", 0, proto, udp_len)
    uck = cksum(pseudo + udp[:6] + b"\x00\x00" + payload)
    if uck == 0:
        uck = 0xFFFF
    udp = udp[:6] + struct.pack(">H", uck) + udp[8:]
    return hdr + udp


def inner_expect(src, dst, ttl, sport, dport, payload):
    return [("src", src), ("dst", dst), ("ttl", ttl), ("proto", 17),
            ("sport", sport), ("dport", dport), ("payload", hexstr(payload)),
            ("roundtrip", "exact")]


def gen_inner():
    p4 = bytes([0xde, 0xad, 0xbe, 0xef])
    f = inner_frame("10.45.0.2", "8.8.8.8", 64, 40000, 53, p4)
    assert len(f) == 32
    write_fixture("inner", "udp_4byte", f,
                  inner_expect("10.45.0.2", "8.8.8.8", 64, 40000, 53, p4))

    write_fixture("inner", "udp_empty",
                  inner_frame("192.168.11.5", "10.100.0.53", 1, 2152, 2152, b""),
                  inner_expect("192.168.11.5", "10.100.0.53", 1, 2152, 2152, b""))

    echo = b"ping-payload-0001"
    write_fixture("inner", "udp_echo",
                  inner_frame("10.45.0.3", "203.0.113.7", 63, 30001, 7, echo),
                  inner_expect("10.45.0.3", "203.0.113.7", 63, 30001, 7, echo))

    rev = inner_frame("8.8.8.8", "10.45.0.2", 57, 53, 40000, p4)
    write_fixture("inner", "udp_reversed", rev,
                  inner_expect("8.8.8.8", "10.45.0.2", 57, 53, 40000, p4))

    dnsq = dns_query(0x1234, "example.com", 1)
    write_fixture("inner", "udp_dns_query",
                  inner_frame("10.45.0.2", "8.8.8.8", 64, 41952, 53, dnsq),
                  inner_expect("10.45.0.2", "8.8.8.8", 64, 41952, 53, dnsq))

    big = bytes((i * 13 + 5) & 0xFF for i in range(512))
    write_fixture("inner", "udp_large",
                  inner_frame("10.45.0.9", "64.6.64.6", 255, 65535, 53, big),
                  inner_expect("10.45.0.9", "64.6.64.6", 255, 65535, 53, big))

    write_fixture("inner", "udp_broadcastish",
                  inner_frame("0.0.0.0", "255.255.255.255", 128, 68, 67, b"\x01"),
                  inner_expect("0.0.0.0", "255.255.255.255", 128, 68, 67, b"\x01"))

    write_fixture("inner", "udp_zero_ttl",
                  inner_frame("172.16.0.1", "172.16.0.2", 0, 1, 1, b"\x00\x00"),
                  inner_expect("172.16.0.1", "172.16.0.2", 0, 1, 1, b"\x00\x00"))


# ------------------------------------------------------------------ DNS ----

def name_bytes(name):
    if name == ".":
        return b"\x00"
    out = b""
    for label in name.split("."):
        assert 1 <= len(label) <= 63
        out += struct.pack(">B", len(label)) + label.encode()
    return out + b"\x00"


def dns_header(txid, qr, rcode, rd, ra, qd, an):
    flags = (qr << 15) | (rd << 8) | (ra << 7) | rcode
    return struct.pack(">HHHHHH", txid, flags, qd, an, 0, 0)


def dns_query(txid, qname, qtype, rd=1):
    return dns_header(txid, 0, 0, rd, 0, 1, 0) + name_bytes(qname) + \
        struct.pack(">HH", qtype, 1)


def rr(name_enc, rtype, ttl, rdata):
    return name_enc + struct.pack(">HHIH", rtype, 1, ttl, len(rdata)) + rdata


def dns_response(txid, qname, qtype, answers, rcode=0, rd=1, ra=1):
    """answers: list of (name_enc, rtype, ttl, rdata)."""
    msg = dns_header(txid, 1, rcode, rd, ra, 1, len(answers))
    msg += name_bytes(qname) + struct.pack(">HH", qtype, 1)
    for a in answers:
        msg += rr(*a)
    return msg


def dns_expect(txid, qr, rcode, rd, ra, qname, qtype, answers, roundtrip):
    kv = [("txid", txid), ("qr", qr), ("rcode", rcode), ("rd", rd), ("ra", ra),
          ("qname", qname), ("qtype", qtype), ("qclass", 1),
          ("ancount", len(answers))]
    for i, a in enumerate(answers):
        kv.append(("answer%d" % i, a))
    kv.append(("roundtrip", roundtrip))
    return kv


def gen_dns():
    q = dns_query(0x1234, "example.com", 1)
    assert len(q) == 29, len(q)
    write_fixture("dns", "query_a", q,
                  dns_expect(0x1234, 0, 0, 1, 0, "example.com", 1, [], "exact"))

    write_fixture("dns", "query_aaaa", dns_query(0xbeef, "v6.sensor-hub.net", 28),
                  dns_expect(0xbeef, 0, 0, 1, 0, "v6.sensor-hub.net", 28, [], "exact"))

    write_fixture("dns", "query_root", dns_query(1, ".", 2),
                  dns_expect(1, 0, 0, 1, 0, ".", 2, [], "exact"))

    write_fixture("dns", "query_uk", dns_query(0x0042, "grid-monitor.co.uk", 1, rd=0),
                  dns_expect(0x0042, 0, 0, 0, 0, "grid-monitor.co.uk", 1, [], "exact"))

    # case must be preserved on the wire
    write_fixture("dns", "query_mixedcase", dns_query(77, "ExAmPlE.CoM", 1),
                  dns_expect(77, 0, 0, 1, 0, "ExAmPlE.CoM", 1, [], "exact"))

    a1 = (name_bytes("example.com"), 1, 60, ip("93.184.216.34"))
    write_fixture("dns", "response_a",
                  dns_response(0x1234, "example.com", 1, [a1]),
                  dns_expect(0x1234, 1, 0, 1, 1, "example.com", 1,
                             ["example.com A 60 93.184.216.34"], "exact"))

    a2 = (name_bytes("example.com"), 1, 300, ip("93.184.216.35"))
    write_fixture("dns", "response_two_a",
                  dns_response(0x1111, "example.com", 1, [a1, a2]),
                  dns_expect(0x1111, 1, 0, 1, 1, "example.com", 1,
                             ["example.com A 60 93.184.216.34",
                              "example.com A 300 93.184.216.35"], "exact"))

    cn = (name_bytes("alias.telemetry.org"), 5, 120, name_bytes("telemetry.org"))
    ta = (name_bytes("telemetry.org"), 1, 120, ip("198.51.100.4"))
    write_fixture("dns", "response_cname_chain",
                  dns_response(0x77aa, "alias.telemetry.org", 1, [cn, ta]),
                  dns_expect(0x77aa, 1, 0, 1, 1, "alias.telemetry.org", 1,
                             ["alias.telemetry.org CNAME 120 telemetry.org",
                              "telemetry.org A 120 198.51.100.4"], "exact"))

    v6 = bytes.fromhex("20010db8000000000000000000000099")
    aaaa = (name_bytes("v6.sensor-hub.net"), 28, 3600, v6)
    write_fixture("dns", "response_aaaa",
                  dns_response(0xbeef, "v6.sensor-hub.net", 28, [aaaa]),
                  dns_expect(0xbeef, 1, 0, 1, 1, "v6.sensor-hub.net", 28,
                             ["v6.sensor-hub.net AAAA 3600 "
                              "2001:0db8:0000:0000:0000:0000:0000:0099"], "exact"))

    write_fixture("dns", "response_nxdomain",
                  dns_response(0x0bad, "no-such-name.us", 1, [], rcode=3),
                  dns_expect(0x0bad, 1, 3, 1, 1, "no-such-name.us", 1, [], "exact"))

    txt = (name_bytes("meta.fleet-tracker.us"), 16, 60, b"\x05hello")
    write_fixture("dns", "response_opaque_txt",
                  dns_response(0x5555, "meta.fleet-tracker.us", 16, [txt]),
                  dns_expect(0x5555, 1, 0, 1, 1, "meta.fleet-tracker.us", 16,
                             ["meta.fleet-tracker.us TYPE16 60 0568656c6c6f"],
                             "exact"))

    # compressed response: answer name is a pointer to the question name at
    # offset 12; semantic roundtrip only (our encoder never compresses)
    msg = dns_header(0x2222, 1, 0, 1, 1, 1, 1)
    msg += name_bytes("pump-status.ca") + struct.pack(">HH", 1, 1)
    msg += struct.pack(">H", 0xC000 | 12)  # pointer to offset 12
    msg += struct.pack(">HHIH", 1, 1, 90, 4) + ip("203.0.113.40")
    write_fixture("dns", "response_compressed", msg,
                  dns_expect(0x2222, 1, 0, 1, 1, "pump-status.ca", 1,
                             ["pump-status.ca A 90 203.0.113.40"], "semantic"))

    # compressed CNAME rdata: target is a pointer back into the question
    msg = dns_header(0x3333, 1, 0, 1, 1, 1, 1)
    q_off = 12
    msg += name_bytes("www.relay-check.jp") + struct.pack(">HH", 1, 1)
    ptr = struct.pack(">H", 0xC000 | (q_off + 4))  # skips "www." label
    msg += struct.pack(">H", 0xC000 | q_off)
    msg += struct.pack(">HHIH", 5, 1, 45, len(ptr)) + ptr
    write_fixture("dns", "response_compressed_cname", msg,
                  dns_expect(0x3333, 1, 0, 1, 1, "www.relay-check.jp", 1,
                             ["www.relay-check.jp CNAME 45 relay-check.jp"],
                             "semantic"))


if __name__ == "__main__":
    gen_gtpu()
    gen_inner()
    gen_dns()

"""Hash-chained consent log tests. The chain oracle is recomputed here
with hashlib directly rather than through the implementation."""

import hashlib
import json

import pytest

from datapolicy.proxy import (
    GENESIS_HASH,
    ConsentLog,
    ConsentLogError,
    ConsentRecord,
    verify_chain,
)


def make_record(i: int, prev_hash: str) -> ConsentRecord:
    return ConsentRecord(
        ts=f"2026-08-15T00:00:{i:02d}Z",
        origin="http://origin.example:80",
        cookie_names=(f"c{i}",),
        request_digest=f"{i:064x}",
        outcome="granted",
        source="auto",
        prev_hash=prev_hash,
    )


class TestAppend:
    def test_genesis_prev_hash_is_64_zeros(self, tmp_path):
        log = ConsentLog(tmp_path / "log.jsonl")
        assert log.tail_hash == "0" * 64
        log.append(make_record(0, log.tail_hash))
        line = (tmp_path / "log.jsonl").read_text().splitlines()[0]
        assert json.loads(line)["prevHash"] == "0" * 64

    def test_chain_mismatch_refused(self, tmp_path):
        log = ConsentLog(tmp_path / "log.jsonl")
        log.append(make_record(0, log.tail_hash))
        with pytest.raises(ConsentLogError, match="chain mismatch"):
            log.append(make_record(1, GENESIS_HASH))

    def test_unknown_source_refused(self, tmp_path):
        log = ConsentLog(tmp_path / "log.jsonl")
        bad = ConsentRecord(ts="t", origin="o", cookie_names=(),
                            request_digest="d", outcome="granted",
                            source="automatic", prev_hash=log.tail_hash)
        with pytest.raises(ConsentLogError, match="unknown record source"):
            log.append(bad)

    def test_reopened_log_continues_the_chain(self, tmp_path):
        path = tmp_path / "log.jsonl"
        log = ConsentLog(path)
        log.append(make_record(0, log.tail_hash))
        tail = log.tail_hash
        again = ConsentLog(path)
        assert again.tail_hash == tail
        again.append(make_record(1, again.tail_hash))
        assert verify_chain(path).ok

    def test_records_round_trip(self, tmp_path):
        log = ConsentLog(tmp_path / "log.jsonl")
        first = make_record(0, log.tail_hash)
        log.append(first)
        second = ConsentRecord(
            ts="2026-08-15T00:01:00Z", origin="http://other.example:80",
            cookie_names=("a", "b"), request_digest="f" * 64,
            outcome="partial", source="user", prev_hash=log.tail_hash,
            agreement_digest="e" * 64, agreement_turtle="<a> <b> <c> .\n")
        log.append(second)
        assert log.records() == [first, second]


class TestVerifyChain:
    def test_empty_and_missing_files_verify(self, tmp_path):
        assert verify_chain(tmp_path / "absent.jsonl").ok
        (tmp_path / "empty.jsonl").write_text("")
        assert verify_chain(tmp_path / "empty.jsonl").ok

    def test_hundred_records_verify_against_manual_rehash(self, tmp_path):
        path = tmp_path / "log.jsonl"
        log = ConsentLog(path)
        for i in range(100):
            log.append(make_record(i, log.tail_hash))
        report = verify_chain(path)
        assert report.ok and report.length == 100

        # independent oracle: re-walk the file with hashlib only
        expected = "0" * 64
        for line in path.read_text().splitlines():
            assert json.loads(line)["prevHash"] == expected
            expected = hashlib.sha256(line.encode()).hexdigest()

    def test_tampered_middle_byte_breaks_chain_at_that_index(self, tmp_path):
        path = tmp_path / "log.jsonl"
        log = ConsentLog(path)
        for i in range(10):
            log.append(make_record(i, log.tail_hash))
        lines = path.read_text().splitlines()
        lines[4] = lines[4].replace('"outcome":"granted"',
                                    '"outcome":"denied"')
        path.write_text("\n".join(lines) + "\n")
        report = verify_chain(path)
        assert not report.ok
        # the forged record still names the right prevHash; the record
        # after it is the first whose prevHash no longer matches
        assert report.first_bad_index == 5

    def test_deleted_record_breaks_chain(self, tmp_path):
        path = tmp_path / "log.jsonl"
        log = ConsentLog(path)
        for i in range(5):
            log.append(make_record(i, log.tail_hash))
        lines = path.read_text().splitlines()
        del lines[2]
        path.write_text("\n".join(lines) + "\n")
        assert not verify_chain(path).ok

    def test_unparseable_line_reported(self, tmp_path):
        path = tmp_path / "log.jsonl"
        log = ConsentLog(path)
        log.append(make_record(0, log.tail_hash))
        with open(path, "a") as fh:
            fh.write("not json\n")
        report = verify_chain(path)
        assert not report.ok and report.first_bad_index == 1

    def test_missing_field_reported(self):
        with pytest.raises(ConsentLogError, match="missing field"):
            ConsentRecord.from_line(
                '{"ts": "t", "outcome": "granted", "source": "auto"}')

    def test_forged_enum_fields_reported(self):
        # the newest record has no successor hash to contradict it, but
        # it still has to spell real enum values
        with pytest.raises(ConsentLogError, match="unknown record outcome"):
            ConsentRecord.from_line('{"ts": "t", "outcome": "granted_"}')
        with pytest.raises(ConsentLogError, match="unknown record source"):
            ConsentRecord.from_line(
                '{"ts": "t", "outcome": "granted", "source": "human"}')

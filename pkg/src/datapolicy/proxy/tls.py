"""Local certificate authority for HTTPS interception.

The proxy answers CONNECT by handshaking with a leaf certificate minted
for the requested host under a locally generated CA. Install the CA
certificate in a browser to inspect HTTPS cookie traffic; nothing here
touches system trust stores.
"""

from __future__ import annotations

import datetime
import ipaddress
import ssl
import tempfile
import threading
from pathlib import Path

from cryptography import x509
from cryptography.hazmat.primitives import hashes, serialization
from cryptography.hazmat.primitives.asymmetric import ec
from cryptography.x509.oid import NameOID

_ONE_DAY = datetime.timedelta(days=1)


def _new_key():
    return ec.generate_private_key(ec.SECP256R1())


def _name(common_name: str) -> x509.Name:
    return x509.Name([x509.NameAttribute(NameOID.COMMON_NAME, common_name)])


class ProxyCA:
    """Generates one CA at construction and mints leaf certs on demand."""

    def __init__(self, directory: str | Path | None = None):
        self.directory = Path(directory) if directory else Path(
            tempfile.mkdtemp(prefix="datapolicy-ca-"))
        self.directory.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._contexts: dict[str, ssl.SSLContext] = {}

        key_path = self.directory / "ca.key.pem"
        cert_path = self.directory / "ca.cert.pem"
        if key_path.exists() and cert_path.exists():
            self._ca_key = serialization.load_pem_private_key(
                key_path.read_bytes(), password=None)
            self._ca_cert = x509.load_pem_x509_certificate(cert_path.read_bytes())
        else:
            self._ca_key = _new_key()
            now = datetime.datetime.now(datetime.timezone.utc)
            self._ca_cert = (
                x509.CertificateBuilder()
                .subject_name(_name("Data-Policy Proxy CA"))
                .issuer_name(_name("Data-Policy Proxy CA"))
                .public_key(self._ca_key.public_key())
                .serial_number(x509.random_serial_number())
                .not_valid_before(now - _ONE_DAY)
                .not_valid_after(now + 365 * _ONE_DAY)
                .add_extension(x509.BasicConstraints(ca=True, path_length=0),
                               critical=True)
                .add_extension(
                    x509.KeyUsage(digital_signature=True, key_cert_sign=True,
                                  crl_sign=True, content_commitment=False,
                                  key_encipherment=False, data_encipherment=False,
                                  key_agreement=False, encipher_only=False,
                                  decipher_only=False),
                    critical=True)
                .sign(self._ca_key, hashes.SHA256())
            )
            key_path.write_bytes(self._ca_key.private_bytes(
                serialization.Encoding.PEM,
                serialization.PrivateFormat.PKCS8,
                serialization.NoEncryption()))
            cert_path.write_bytes(self._ca_cert.public_bytes(
                serialization.Encoding.PEM))

    @property
    def ca_cert_path(self) -> Path:
        return self.directory / "ca.cert.pem"

    def mint(self, host: str) -> tuple[bytes, bytes]:
        """Leaf certificate and key for one host, both PEM."""
        key = _new_key()
        try:
            san: x509.GeneralName = x509.IPAddress(ipaddress.ip_address(host))
        except ValueError:
            san = x509.DNSName(host)
        now = datetime.datetime.now(datetime.timezone.utc)
        cert = (
            x509.CertificateBuilder()
            .subject_name(_name(host))
            .issuer_name(self._ca_cert.subject)
            .public_key(key.public_key())
            .serial_number(x509.random_serial_number())
            .not_valid_before(now - _ONE_DAY)
            .not_valid_after(now + 90 * _ONE_DAY)
            .add_extension(x509.SubjectAlternativeName([san]), critical=False)
            .add_extension(x509.BasicConstraints(ca=False, path_length=None),
                           critical=True)
            .sign(self._ca_key, hashes.SHA256())
        )
        return (
            cert.public_bytes(serialization.Encoding.PEM),
            key.private_bytes(serialization.Encoding.PEM,
                              serialization.PrivateFormat.PKCS8,
                              serialization.NoEncryption()),
        )

    def server_context(self, host: str) -> ssl.SSLContext:
        """TLS server context presenting a cert for host; cached."""
        with self._lock:
            ctx = self._contexts.get(host)
            if ctx is not None:
                return ctx
            cert_pem, key_pem = self.mint(host)
            cert_file = self.directory / f"leaf-{host}.cert.pem"
            key_file = self.directory / f"leaf-{host}.key.pem"
            cert_file.write_bytes(cert_pem)
            key_file.write_bytes(key_pem)
            ctx = ssl.SSLContext(ssl.PROTOCOL_TLS_SERVER)
            ctx.load_cert_chain(certfile=str(cert_file), keyfile=str(key_file))
            self._contexts[host] = ctx
            return ctx

from .AuditTrail import *

"""
Shared configuration, logging, exceptions and random streams.
"""

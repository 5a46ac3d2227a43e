# Support-reply drafting. Planted: three moving model aliases (NMVP x3);
# everything else is configured, so no other rule fires.

from openai import OpenAI

client = OpenAI(timeout=30.0, max_retries=2)

SYSTEM = "You draft polite, accurate support replies."


def draft_reply(ticket_text):
    response = client.chat.completions.create(
        model="gpt-4o",
        messages=[
            {"role": "system", "content": SYSTEM},
            {"role": "user", "content": ticket_text},
        ],
        max_tokens=400,
        temperature=0.2,
    )
    return response.choices[0].message.content


def summarize_thread(thread_text):
    response = client.chat.completions.create(
        model="gpt-4o-mini",
        messages=[
            {"role": "system", "content": SYSTEM},
            {"role": "user", "content": "Summarize: " + thread_text},
        ],
        max_tokens=200,
        temperature=0.0,
    )
    return response.choices[0].message.content


def classify_intent(ticket_text):
    response = client.chat.completions.create(
        model="chatgpt-4o-latest",
        messages=[
            {"role": "system", "content": "Classify the intent in one word."},
            {"role": "user", "content": ticket_text},
        ],
        max_tokens=10,
        temperature=0.0,
    )
    return response.choices[0].message.content
